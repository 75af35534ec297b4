"""CPLEX LP format writer and a reader for the subset the writer produces."""

from __future__ import annotations

import math
import re

from .model import Model, ModelError, VarKind

_NAME_FIRST = r"A-Za-z!\"#$%&()/,;?@_`'{}|~"
_NAME_RE = re.compile(rf"^[{_NAME_FIRST}][{_NAME_FIRST}0-9.]*$")
_LINE_WIDTH = 100
_KEYWORDS = {"minimize", "minimum", "min", "maximize", "maximum", "max",
             "subject", "st", "s.t.", "such", "bounds", "bound", "general", "generals",
             "gen", "binary", "binaries", "bin", "end", "free", "inf", "infinity"}


class LPNameError(ModelError):
    pass


class LPParseError(ValueError):
    pass


def check_lp_name(name: str) -> str:
    if not _NAME_RE.match(name) or len(name) > 255:
        raise LPNameError(f"name {name!r} is not a legal LP identifier")
    if name[0] in "eE" or name.lower() in _KEYWORDS:
        # a leading e/E is read as an exponent by some readers
        raise LPNameError(f"name {name!r} is ambiguous in LP format")
    return name


def fmt_num(x: float) -> str:
    if x == math.inf:
        return "+inf"
    if x == -math.inf:
        return "-inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return format(x, ".12g")


def _terms(terms) -> list[str]:
    out = []
    for i, (coef, var) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{fmt_num(mag)} {var}"
        out.append(f"- {body}" if (i == 0 and sign == "-") else
                   (body if i == 0 else f"{sign} {body}"))
    return out


def _wrap(head: str, pieces: list[str], tail: str = "") -> list[str]:
    lines, cur = [], head
    for p in pieces + ([tail] if tail else []):
        if len(cur) + 1 + len(p) > _LINE_WIDTH and cur.strip():
            lines.append(cur)
            cur = "   " + p
        else:
            cur = f"{cur} {p}" if cur else p
    lines.append(cur)
    return lines


def write_lp(model: Model) -> str:
    """Serialise ``model`` to CPLEX LP text. Identical models give identical bytes."""
    for name in model.variables:
        check_lp_name(name)
    for con in model.constraints:
        check_lp_name(con.name)
    first_var = next(iter(model.variables), None)

    lines = [f"\\ Model {model.name}", "Minimize"]
    obj = [(c, v) for v, c in model.objective.items()]
    if obj:
        lines += _wrap(" obj:", _terms(obj))
    elif first_var is not None:
        lines.append(f" obj: 0 {first_var}")
    else:
        lines.append(" obj:")

    lines.append("Subject To")
    for con in model.constraints:
        terms = _terms(con.terms)
        if not terms:
            if first_var is None:
                raise ModelError(f"constraint {con.name} is empty and the model has no variables")
            terms = [f"0 {first_var}"]
        lines += _wrap(f" {con.name}:", terms, f"{con.sense.value} {fmt_num(con.rhs)}")

    bounds, generals, binaries = [], [], []
    for v in model.variables.values():
        if v.kind is VarKind.BINARY:
            binaries.append(v.name)
            if (v.lower, v.upper) != (0, 1):
                bounds.append(f" {fmt_num(v.lower)} <= {v.name} <= {fmt_num(v.upper)}")
            continue
        if v.kind is VarKind.INTEGER:
            generals.append(v.name)
        if v.lower == -math.inf and v.upper == math.inf:
            bounds.append(f" {v.name} free")
        elif (v.lower, v.upper) != (0, math.inf):
            bounds.append(f" {fmt_num(v.lower)} <= {v.name} <= {fmt_num(v.upper)}")
    if bounds:
        lines.append("Bounds")
        lines += bounds
    if generals:
        lines.append("Generals")
        lines += _wrap("", generals)
    if binaries:
        lines.append("Binaries")
        lines += _wrap("", binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


_SECTION_RE = re.compile(
    r"^(minimize|minimum|min|maximize|maximum|max|subject\s+to|such\s+that|st|s\.t\.|"
    r"bounds?|generals?|gen|integers?|binary|binaries|bin|end)$", re.I)
_TOKEN_RE = re.compile(r"\s*(<=|>=|=<|=>|<|>|=|[+-]|[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?|"
                       r"[^\s+\-<>=:]+:?|:)")


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise LPParseError(f"cannot tokenise near {text[pos:pos + 20]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _parse_expr(toks: list[str]) -> list[tuple[float, str]]:
    terms, sign, coef = [], 1.0, None
    for tok in toks:
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
        elif _is_number(tok) and coef is None:
            coef = float(tok)
        else:
            c = (1.0 if coef is None else coef) * sign
            terms.append((c, tok))
            sign, coef = 1.0, None
    return terms


def read_lp(text: str) -> Model:
    """Parse LP text in the dialect produced by :func:`write_lp`."""
    model = Model()
    section, stmts = None, {"obj": [], "con": [], "bounds": [], "gen": [], "bin": []}
    buf: list[str] = []

    def flush():
        if buf:
            stmts[section].append(" ".join(buf))
            buf.clear()

    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            flush()
            key = m.group(1).lower()
            if key.startswith(("min", "max")):
                if key.startswith("max"):
                    raise LPParseError("maximisation models are not supported")
                section = "obj"
            elif key.startswith(("sub", "such", "st", "s.t")):
                section = "con"
            elif key.startswith("bound"):
                section = "bounds"
            elif key.startswith(("gen", "int")):
                section = "gen"
            elif key.startswith("bin"):
                section = "bin"
            else:
                section = "end"
            continue
        if section is None or section == "end":
            raise LPParseError(f"text outside a section: {line!r}")
        if section == "con" and re.match(r"^[^\s:]+\s*:", line) and buf:
            flush()
        elif section in ("bounds",):
            flush()
        buf.append(line)
    flush()

    def ensure(name: str):
        if name not in model.variables:
            model.add_var(name, VarKind.CONTINUOUS, 0, math.inf)

    obj_terms = []
    for stmt in stmts["obj"]:
        toks = _tokens(stmt)
        if toks and toks[0].endswith(":"):
            toks = toks[1:]
        obj_terms += _parse_expr(toks)

    cons = []
    for i, stmt in enumerate(stmts["con"]):
        toks = _tokens(stmt)
        name = f"R{i + 1}"
        if toks and toks[0].endswith(":"):
            name, toks = toks[0][:-1], toks[1:]
        senses = [j for j, t in enumerate(toks) if t in ("<=", ">=", "=<", "=>", "<", ">", "=")]
        if len(senses) != 1:
            raise LPParseError(f"constraint {name}: expected one relational operator")
        j = senses[0]
        op = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(toks[j], toks[j])
        rhs_toks = toks[j + 1:]
        rhs = float("".join(rhs_toks))
        cons.append((name, _parse_expr(toks[:j]), op, rhs))

    bounds = {}
    for stmt in stmts["bounds"]:
        toks = [t.lower() if t.lower() in ("inf", "+inf", "-inf", "infinity", "free") else t
                for t in stmt.split()]
        if len(toks) == 2 and toks[1] == "free":
            bounds[toks[0]] = (-math.inf, math.inf)
        elif len(toks) == 5 and toks[1] == toks[3] == "<=":
            bounds[toks[2]] = (float(toks[0]), float(toks[4]))
        elif len(toks) == 3 and toks[1] in ("<=", ">=", "="):
            lo, hi = bounds.get(toks[0], (0.0, math.inf))
            val = float(toks[2])
            bounds[toks[0]] = {"<=": (lo, val), ">=": (val, hi), "=": (val, val)}[toks[1]]
        else:
            raise LPParseError(f"cannot parse bound {stmt!r}")

    kinds = {}
    for stmt in stmts["gen"]:
        for name in stmt.split():
            kinds[name] = VarKind.INTEGER
    for stmt in stmts["bin"]:
        for name in stmt.split():
            kinds[name] = VarKind.BINARY

    order = []
    for _, v in obj_terms:
        order.append(v)
    for _, terms, _, _ in cons:
        order += [v for _, v in terms]
    order += list(bounds) + list(kinds)
    for name in dict.fromkeys(order):
        kind = kinds.get(name, VarKind.CONTINUOUS)
        lo, hi = bounds.get(name, (0.0, 1.0 if kind is VarKind.BINARY else math.inf))
        model.add_var(name, kind, lo, hi)
    for name, terms, op, rhs in cons:
        for _, v in terms:
            ensure(v)
        model.add_constraint(name, terms, op, rhs)
    model.set_objective(obj_terms)
    return model
