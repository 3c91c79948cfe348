"""Tokenizer and recursive-descent parsers for the text DSLs.

Expressions::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ['^' unary]
    atom  := INT | NAME | NAME '(' expr ')' | '(' expr ')'

Sets::

    set := 'empty' | 'naturals' | '{' ints '}' | 'finite' '{' ints '}'
         | 'progression' '(' expr ',' expr ')'
         | 'union' NAME 'in' INT '..' [INT] ':' '[' expr ',' expr ']'
         | 'points' NAME 'in' INT '..' [INT] ':' expr
         | 'union' '(' set {',' set} ')' | 'intersect' '(' set {',' set} ')'
         | 'complement' '(' set ')' | 'shift' '(' set ',' INT ')'
         | 'shifts' '(' set ',' INT ')'
         | 'intervals' '(' [interval {',' interval}] ')' | interval
    interval := '[' INT ',' INT ']'

Expression trees are plain tuples so they compare and hash structurally.
"""
from __future__ import annotations

import re
from fractions import Fraction

from . import certified as C
from .errors import DSLSyntaxError, DomainError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\.\.|[-+*/^()\[\]{},:;=]))")

FUNCTIONS = ("log", "sqrt", "floor", "ceil")


class Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise DSLSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            start = m.start(m.lastindex)
            if m.group(1):
                self.items.append(("int", m.group(1), start))
            elif m.group(2):
                self.items.append(("name", m.group(2), start))
            else:
                self.items.append(("sym", m.group(3), start))
            pos = m.end()
        self.items.append(("end", "", len(text)))
        self.i = 0

    def peek(self, offset=0):
        return self.items[min(self.i + offset, len(self.items) - 1)]

    def next(self):
        tok = self.items[self.i]
        if tok[0] != "end":
            self.i += 1
        return tok

    def error(self, message):
        raise DSLSyntaxError(message, self.text, self.peek()[2])

    def accept(self, value):
        if self.peek()[1] == value and self.peek()[0] in ("sym", "name"):
            return self.next()
        return None

    def expect(self, value):
        tok = self.accept(value)
        if tok is None:
            self.error(f"expected {value!r}")
        return tok

    def expect_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        tok = self.peek()
        if tok[0] != "int":
            self.error("expected an integer")
        self.next()
        return sign * int(tok[1])

    def expect_name(self) -> str:
        tok = self.peek()
        if tok[0] != "name":
            self.error("expected a name")
        self.next()
        return tok[1]

    def at_end(self):
        return self.peek()[0] == "end"

    def finish(self):
        if not self.at_end():
            self.error("unexpected trailing input")


# --------------------------------------------------------------------------
# expressions


def parse_expr_tokens(tk: Tokens):
    node = _term(tk)
    while tk.peek()[1] in ("+", "-") and tk.peek()[0] == "sym":
        op = tk.next()[1]
        node = ("add" if op == "+" else "sub", node, _term(tk))
    return node


def _term(tk):
    node = _unary(tk)
    while tk.peek()[1] in ("*", "/") and tk.peek()[0] == "sym":
        op = tk.next()[1]
        node = ("mul" if op == "*" else "div", node, _unary(tk))
    return node


def _unary(tk):
    if tk.accept("-"):
        return ("neg", _unary(tk))
    return _power(tk)


def _power(tk):
    base = _atom(tk)
    if tk.accept("^"):
        return ("pow", base, _unary(tk))
    return base


def _atom(tk):
    kind, value, pos = tk.peek()
    if kind == "int":
        tk.next()
        return ("num", int(value))
    if kind == "name":
        tk.next()
        if value in FUNCTIONS:
            tk.expect("(")
            arg = parse_expr_tokens(tk)
            tk.expect(")")
            return ("call", value, arg)
        return ("var", value)
    if tk.accept("("):
        node = parse_expr_tokens(tk)
        tk.expect(")")
        return node
    tk.error("expected a number, name or '('")


def parse_expr(text: str):
    tk = Tokens(text)
    node = parse_expr_tokens(tk)
    tk.finish()
    return node


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def expr_to_text(node, parent=0) -> str:
    kind = node[0]
    if kind == "num":
        return str(node[1])
    if kind == "var":
        return node[1]
    if kind == "call":
        return f"{node[1]}({expr_to_text(node[2])})"
    p = _PREC[kind]
    if kind == "neg":
        s = "-" + expr_to_text(node[1], p)
    elif kind == "pow":
        s = f"{expr_to_text(node[1], p + 1)}^{expr_to_text(node[2], p)}"
    else:
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[kind]
        s = f"{expr_to_text(node[1], p)}{sym}{expr_to_text(node[2], p + 1)}"
    return f"({s})" if p < parent or (kind == "pow" and parent == p) else s


def free_vars(node) -> set[str]:
    kind = node[0]
    if kind == "var":
        return {node[1]}
    if kind == "num":
        return set()
    if kind == "call":
        return free_vars(node[2])
    return set().union(*(free_vars(c) for c in node[1:]))


def substitute(node, name: str, replacement):
    kind = node[0]
    if kind == "var":
        return replacement if node[1] == name else node
    if kind == "num":
        return node
    if kind == "call":
        return ("call", node[1], substitute(node[2], name, replacement))
    return (kind,) + tuple(substitute(c, name, replacement) for c in node[1:])


def evaluate(node, env: dict) -> C.Real:
    """Evaluate to a certified Real (exact whenever possible)."""
    kind = node[0]
    if kind == "num":
        return C.Exact(Fraction(node[1]))
    if kind == "var":
        if node[1] not in env:
            raise DomainError(f"unbound variable {node[1]!r}")
        return C.to_real(env[node[1]])
    if kind == "neg":
        return C.neg(evaluate(node[1], env))
    if kind == "call":
        arg = evaluate(node[2], env)
        name = node[1]
        if name == "log":
            return C.log(arg)
        if name == "sqrt":
            return C.sqrt(arg)
        if name == "floor":
            return C.Exact(Fraction(C.floor_real(arg)))
        return C.Exact(Fraction(C.ceil_real(arg)))
    a = evaluate(node[1], env)
    b = evaluate(node[2], env)
    if kind == "add":
        return C.add(a, b)
    if kind == "sub":
        return C.add(a, C.neg(b))
    if kind == "mul":
        return C.mul(a, b)
    if kind == "div":
        return C.div(a, b)
    e = b.exact
    if e is None:
        raise DomainError("exponents must be exact rationals")
    if a.exact is not None and e.denominator == 1 and a.exact < 0:
        return C.Exact(a.exact ** e.numerator)
    return C.pow_real(a, e)


def evaluate_int(node, env: dict) -> int:
    v = evaluate(node, env).exact
    if v is None or v.denominator != 1:
        raise DomainError(f"{expr_to_text(node)} is not an integer at {env}")
    return v.numerator


# --------------------------------------------------------------------------
# syntactic monotonicity


def monotonicity(node, var: str):
    """Conservative shape of ``node`` in ``var >= 0``.

    Returns a pair (direction, sign) with direction in {'const', 'inc', 'dec',
    None} and sign in {'pos', 'nonneg', None}.  ``None`` means unknown.
    """
    kind = node[0]
    if kind == "num":
        v = node[1]
        return "const", ("pos" if v > 0 else "nonneg" if v == 0 else None)
    if kind == "var":
        return ("inc", "nonneg") if node[1] == var else (None, None)
    if kind == "neg":
        d, _ = monotonicity(node[1], var)
        return {"inc": "dec", "dec": "inc"}.get(d, d), None
    if kind == "call":
        d, s = monotonicity(node[2], var)
        if node[1] == "log":
            return d, None
        return d, s
    (da, sa), (db, sb) = monotonicity(node[1], var), monotonicity(node[2], var)
    if kind == "add":
        sign = _sign_add(sa, sb)
        return _dir_add(da, db), sign
    if kind == "sub":
        return _dir_add(da, {"inc": "dec", "dec": "inc"}.get(db, db)), None
    if kind == "mul":
        if sa in ("pos", "nonneg") and sb in ("pos", "nonneg"):
            if da in ("inc", "const") and db in ("inc", "const"):
                return ("const" if da == db == "const" else "inc"), _sign_mul(sa, sb)
        return None, _sign_mul(sa, sb)
    if kind == "div":
        if db == "const" and sb == "pos":
            return da, sa
        if da == "const" and sa in ("pos", "nonneg") and db == "inc" and sb == "pos":
            return "dec", sa
        return None, None
    if kind == "pow":
        if db == "const" and sa in ("pos", "nonneg"):
            e = _const_value(node[2])
            if e is not None and e > 0:
                return da, sa
            if e is not None and e < 0:
                return {"inc": "dec", "dec": "inc"}.get(da, da), sa
        return None, None
    return None, None


def _const_value(node):
    try:
        return evaluate(node, {}).exact
    except Exception:
        return None


def _dir_add(a, b):
    if a == "const":
        return b
    if b == "const":
        return a
    return a if a == b else None


def _sign_add(a, b):
    if a == "pos" and b in ("pos", "nonneg") or b == "pos" and a in ("pos", "nonneg"):
        return "pos"
    if a == "nonneg" and b == "nonneg":
        return "nonneg"
    return None


def _sign_mul(a, b):
    if a == "pos" and b == "pos":
        return "pos"
    if a in ("pos", "nonneg") and b in ("pos", "nonneg"):
        return "nonneg"
    return None


# --------------------------------------------------------------------------
# sets (syntax tree; nset builds the semantic objects)


def parse_set_tokens(tk: Tokens):
    kind, value, pos = tk.peek()
    if tk.accept("{"):
        return ("finite", _int_list(tk, "}"))
    if tk.accept("["):
        lo = tk.expect_int()
        tk.expect(",")
        hi = tk.expect_int()
        tk.expect("]")
        return ("intervals", ((lo, hi),))
    if kind != "name":
        tk.error("expected a set expression")
    tk.next()
    if value == "empty":
        return ("empty",)
    if value == "naturals":
        return ("naturals",)
    if value == "finite":
        tk.expect("{")
        return ("finite", _int_list(tk, "}"))
    if value == "progression":
        tk.expect("(")
        a = parse_expr_tokens(tk)
        tk.expect(",")
        d = parse_expr_tokens(tk)
        tk.expect(")")
        return ("progression", evaluate_int(a, {}), evaluate_int(d, {}))
    if value in ("union", "points") and tk.peek()[0] == "name":
        var = tk.expect_name()
        tk.expect("in")
        k0 = tk.expect_int()
        tk.expect("..")
        k1 = tk.expect_int() if tk.peek()[0] == "int" else None
        tk.expect(":")
        if value == "points":
            e = parse_expr_tokens(tk)
            return ("family", var, k0, k1, e, e)
        tk.expect("[")
        lo = parse_expr_tokens(tk)
        tk.expect(",")
        hi = parse_expr_tokens(tk)
        tk.expect("]")
        return ("family", var, k0, k1, lo, hi)
    if value in ("union", "intersect"):
        tk.expect("(")
        parts = [parse_set_tokens(tk)]
        while tk.accept(","):
            parts.append(parse_set_tokens(tk))
        tk.expect(")")
        return (value, tuple(parts))
    if value == "complement":
        tk.expect("(")
        s = parse_set_tokens(tk)
        tk.expect(")")
        return ("complement", s)
    if value in ("shift", "shifts"):
        tk.expect("(")
        s = parse_set_tokens(tk)
        tk.expect(",")
        i = tk.expect_int()
        tk.expect(")")
        if i < 0:
            raise DSLSyntaxError("shift amount must be non-negative", tk.text, pos)
        return (value, s, i)
    if value == "intervals":
        tk.expect("(")
        items = []
        if not tk.accept(")"):
            while True:
                tk.expect("[")
                lo = tk.expect_int()
                tk.expect(",")
                hi = tk.expect_int()
                tk.expect("]")
                items.append((lo, hi))
                if tk.accept(")"):
                    break
                tk.expect(",")
        return ("intervals", tuple(items))
    raise DSLSyntaxError(f"unknown set form {value!r}", tk.text, pos)


def _int_list(tk, close):
    items = []
    if tk.accept(close):
        return tuple(items)
    while True:
        items.append(tk.expect_int())
        if tk.accept(close):
            return tuple(items)
        tk.expect(",")


def parse_set_syntax(text: str):
    tk = Tokens(text)
    tree = parse_set_tokens(tk)
    tk.finish()
    return tree


def split_top_level(text: str, sep: str) -> list[str]:
    """Split on ``sep`` occurrences outside brackets."""
    depth, parts, start = 0, [], 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            start = i + len(sep)
            i = start
            continue
        i += 1
    parts.append(text[start:])
    return parts
