#include <set>
#include <string>

#include "hmertk/validate.hpp"

namespace hmertk {

namespace {

// CROHME-style control-word inventory plus the macros the cleaning and
// normalization passes need to see (styles, spacing, \underline). Extend via
// the [vocabulary] config section rather than editing this list.
const char* const kBuiltinWords[] = {
    // greek
    "\\alpha", "\\beta", "\\gamma", "\\delta", "\\epsilon", "\\varepsilon",
    "\\zeta", "\\eta", "\\theta", "\\vartheta", "\\iota", "\\kappa", "\\lambda",
    "\\mu", "\\nu", "\\xi", "\\pi", "\\rho", "\\sigma", "\\tau", "\\upsilon",
    "\\phi", "\\varphi", "\\chi", "\\psi", "\\omega", "\\Gamma", "\\Delta",
    "\\Theta", "\\Lambda", "\\Xi", "\\Pi", "\\Sigma", "\\Upsilon", "\\Phi",
    "\\Psi", "\\Omega",
    // big operators and functions
    "\\frac", "\\sqrt", "\\sum", "\\prod", "\\int", "\\oint", "\\lim",
    "\\log", "\\ln", "\\lg", "\\exp", "\\sin", "\\cos", "\\tan", "\\cot",
    "\\sec", "\\csc", "\\arcsin", "\\arccos", "\\arctan", "\\sinh", "\\cosh",
    "\\tanh", "\\coth", "\\max", "\\min", "\\sup", "\\inf", "\\gcd", "\\det",
    "\\dim", "\\arg", "\\deg", "\\Pr", "\\bmod", "\\pmod", "\\mod",
    "\\operatorname",
    // relations
    "\\leq", "\\geq", "\\neq", "\\le", "\\ge", "\\ne", "\\lt", "\\gt",
    "\\equiv", "\\approx", "\\sim", "\\simeq", "\\cong", "\\propto",
    "\\subset", "\\supset", "\\subseteq", "\\supseteq", "\\in", "\\ni",
    "\\notin", "\\ll", "\\gg", "\\prec", "\\succ", "\\mid", "\\nmid",
    "\\parallel", "\\perp", "\\models", "\\vdash", "\\dashv", "\\doteq",
    "\\asymp",
    // arrows
    "\\rightarrow", "\\leftarrow", "\\Rightarrow", "\\Leftarrow", "\\to",
    "\\leftrightarrow", "\\Leftrightarrow", "\\longrightarrow",
    "\\longleftarrow", "\\mapsto", "\\hookrightarrow", "\\uparrow",
    "\\downarrow", "\\nearrow", "\\searrow", "\\rightleftharpoons", "\\iff",
    "\\implies", "\\xrightarrow", "\\xleftarrow",
    // set/logic/misc symbols
    "\\infty", "\\partial", "\\nabla", "\\forall", "\\exists", "\\nexists",
    "\\emptyset", "\\varnothing", "\\neg", "\\lnot", "\\land", "\\lor",
    "\\cup", "\\cap", "\\vee", "\\wedge", "\\setminus", "\\backslash",
    "\\pm", "\\mp", "\\times", "\\div", "\\cdot", "\\circ", "\\bullet",
    "\\star", "\\ast", "\\oplus", "\\ominus", "\\otimes", "\\oslash",
    "\\odot", "\\dagger", "\\ddagger", "\\angle", "\\triangle", "\\square",
    "\\diamond", "\\hbar", "\\ell", "\\Re", "\\Im", "\\aleph", "\\wp",
    "\\prime", "\\cdots", "\\ldots", "\\vdots", "\\ddots", "\\dots",
    "\\therefore", "\\because", "\\top", "\\bot", "\\triangleq", "\\degree",
    "\\S", "\\P",
    // accents and decorations
    "\\hat", "\\bar", "\\vec", "\\dot", "\\ddot", "\\tilde", "\\widehat",
    "\\widetilde", "\\overline", "\\underline", "\\overrightarrow",
    "\\overleftarrow", "\\acute", "\\grave", "\\check", "\\breve",
    "\\mathring", "\\overbrace", "\\underbrace", "\\not",
    // delimiters
    "\\left", "\\right", "\\langle", "\\rangle", "\\lfloor", "\\rfloor",
    "\\lceil", "\\rceil", "\\vert", "\\Vert", "\\lbrace", "\\rbrace",
    "\\lbrack", "\\rbrack", "\\lvert", "\\rvert",
    // styles (stripped by normalize, valid on input)
    "\\textbf", "\\textit", "\\textrm", "\\texttt", "\\textsf", "\\text",
    "\\mathbf", "\\mathit", "\\mathrm", "\\mathsf", "\\mathtt", "\\mathcal",
    "\\mathbb", "\\mathfrak", "\\mathscr", "\\boldsymbol", "\\bm",
    // spacing and structure
    "\\quad", "\\qquad", "\\space", "\\hspace", "\\vspace", "\\phantom",
    "\\vphantom", "\\hphantom", "\\mbox", "\\hbox", "\\limits", "\\nolimits",
    "\\displaystyle", "\\textstyle", "\\scriptstyle", "\\binom", "\\atop",
    "\\choose", "\\over", "\\stackrel", "\\overset", "\\underset",
    "\\substack", "\\begin", "\\end", "\\smash",
};

Vocabulary make_builtin() {
  std::set<std::string> words;
  for (const char* w : kBuiltinWords) words.insert(w);
  return Vocabulary(std::move(words));
}

}  // namespace

const Vocabulary& Vocabulary::builtin() {
  static const Vocabulary instance = make_builtin();
  return instance;
}

}  // namespace hmertk
