"""Connection documents, the expression language, and the ``gmdet`` command.

A document is one JSON object::

    {"parameters": ["alpha"], "rank": 1,
     "points": [{"a": "0", "m": 2}],
     "g": [[[["0"]], [["alpha"]]]],
     "eta": [[[[{"alpha": "-1"}]]]],
     "eta0": [[{}]]}

``g[i][k]`` is the matrix g_{k+1} at point i, ``eta[i][s]`` the matrix
η_{s+1} (entries are one-forms keyed by parameter), ``eta0`` the
constant part.  ``eta`` and ``eta0`` may be omitted when zero.

Exit codes: 0 success, 1 mismatch, 2 malformed input, 3 precondition.
"""

import argparse
import json
import json.decoder
import json.scanner
import re
import sys

from . import linalg as la
from .cohomology import h_basis
from .connection import (Connection, FormMatrix, classify_point, is_vertical,
                         transport_mobius)
from .errors import GmdetError, InputError, PreconditionError
from .funcfield import FunctionField, OneFormK, render
from .gaussmanin import gm_determinant_lhs
from .localformula import (check_preconditions, gm_determinant_rhs,
                           verify)
from .ratline import T, line_field

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# expressions

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Tokens:
    def __init__(self, text, origin):
        self.items = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m.group(0).strip() == "":
                break
            start = m.start(m.lastindex)
            if m.group(1):
                self.items.append(("int", m.group(1), start))
            elif m.group(2):
                self.items.append(("name", m.group(2), start))
            else:
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise origin.error(f"unexpected character {ch!r}", start)
                self.items.append((ch, ch, start))
            pos = m.end()
        self.items.append(("end", "", len(text)))
        self.k = 0

    def peek(self):
        return self.items[self.k]

    def next(self):
        tok = self.items[self.k]
        self.k += 1
        return tok


class _Origin:
    """Maps offsets inside an expression string back to document positions."""

    def __init__(self, doc=None, offset=None, where=None):
        self.doc = doc
        self.offset = offset
        self.where = where

    def error(self, message, pos):
        if self.where:
            message = f"{self.where}: {message}"
        if self.doc is None or self.offset is None:
            return InputError(f"{message} (at character {pos + 1})")
        line, col = _line_col(self.doc, self.offset + pos)
        return InputError(message, line, col)


def parse_expression(text, K, origin=None):
    """Parse an exact expression over K = Q(parameters)."""
    origin = origin or _Origin()
    toks = _Tokens(text, origin)

    def expr():
        val = term()
        while toks.peek()[0] in ("+", "-"):
            op = toks.next()[0]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while toks.peek()[0] in ("*", "/"):
            op, _, pos = toks.next()
            rhs = unary()
            if op == "*":
                val = val * rhs
            else:
                if not rhs:
                    raise origin.error("division by zero", pos)
                val = val / rhs
        return val

    def unary():
        if toks.peek()[0] in ("+", "-"):
            op = toks.next()[0]
            val = unary()
            return -val if op == "-" else val
        return power()

    def power():
        base = atom()
        if toks.peek()[0] == "^":
            toks.next()
            kind, val, pos = toks.next()
            if kind != "int":
                raise origin.error("exponent must be a non-negative integer", pos)
            base = base ** int(val)
        return base

    def atom():
        kind, val, pos = toks.next()
        if kind == "int":
            return K(int(val))
        if kind == "name":
            if val not in K.names:
                raise origin.error(f"unknown parameter {val!r}", pos)
            return K.gen(val)
        if kind == "(":
            inner = expr()
            kind2, _, pos2 = toks.next()
            if kind2 != ")":
                raise origin.error("expected ')'", pos2)
            return inner
        if kind == "end":
            raise origin.error("unexpected end of expression", pos)
        raise origin.error(f"unexpected {val!r}", pos)

    value = expr()
    kind, val, pos = toks.peek()
    if kind != "end":
        raise origin.error(f"unexpected {val!r}", pos)
    return value


# ---------------------------------------------------------------------------
# JSON with positions

class _PosStr(str):
    pos = 0


class _PosList(list):
    pos = 0


class _PosDict(dict):
    pos = 0


def _line_col(doc, pos):
    line = doc.count("\n", 0, pos) + 1
    col = pos - (doc.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _positioned_decoder():
    dec = json.JSONDecoder()

    def parse_string(s, end, strict):
        val, new_end = json.decoder.scanstring(s, end, strict)
        out = _PosStr(val)
        out.pos = end  # first character after the opening quote
        return out, new_end

    def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None):
        obj, end = json.decoder.JSONObject(s_and_end, strict, scan_once, None, None, memo)
        out = _PosDict(obj)
        out.pos = s_and_end[1] - 1
        return out, end

    def parse_array(s_and_end, scan_once):
        arr, end = json.decoder.JSONArray(s_and_end, scan_once)
        out = _PosList(arr)
        out.pos = s_and_end[1] - 1
        return out, end

    def parse_float(text):
        raise ValueError("floating point numbers are not allowed; use exact expression strings")

    dec.parse_string = parse_string
    dec.parse_object = parse_object
    dec.parse_array = parse_array
    dec.parse_float = parse_float
    dec.memo = {}
    dec.scan_once = json.scanner.py_make_scanner(dec)
    return dec


_JSON_ATOM = re.compile(r'"(?:[^"\\]|\\.)*"|-?\d+(\.\d+)?([eE][+-]?\d+)?')


def _first_float(text):
    for m in _JSON_ATOM.finditer(text):
        if m.group(1) or m.group(2):
            return _line_col(text, m.start())
    return None, None


def load_document(text):
    try:
        return _positioned_decoder().decode(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise InputError(str(exc), *_first_float(text)) from None


class _Reader:
    def __init__(self, doc):
        self.doc = doc

    def error(self, message, node):
        pos = getattr(node, "pos", None)
        if pos is None:
            return InputError(message)
        line, col = _line_col(self.doc, pos)
        return InputError(message, line, col)

    def expect(self, node, kind, what):
        if not isinstance(node, kind) or (kind is int and isinstance(node, bool)):
            names = {list: "a list", dict: "an object", str: "a string", int: "an integer"}
            raise self.error(f"{what} must be {names.get(kind, kind.__name__)}", node)
        return node

    def scalar(self, node, K, what):
        if isinstance(node, bool):
            raise self.error(f"{what} must be an expression string", node)
        if isinstance(node, int):
            return K(node)
        self.expect(node, str, what)
        return parse_expression(node, K, _Origin(self.doc, node.pos, what))

    def matrix(self, node, r, what, entry):
        self.expect(node, list, what)
        if len(node) != r:
            raise self.error(f"{what} must have {r} rows, found {len(node)}", node)
        out = []
        for p, row in enumerate(node):
            self.expect(row, list, f"{what} row {p + 1}")
            if len(row) != r:
                raise self.error(f"{what} row {p + 1} must have {r} entries, found {len(row)}", row)
            out.append([entry(x, f"{what}[{p + 1},{q + 1}]") for q, x in enumerate(row)])
        return out

    def oneform(self, node, K, what):
        if isinstance(node, (int, str)) and not isinstance(node, bool):
            val = self.scalar(node, K, what)
            if val:
                raise self.error(f"{what} must be a one-form object keyed by parameter", node)
            return OneFormK(K)
        self.expect(node, dict, what)
        coeffs = {}
        for key, val in node.items():
            if key not in K.names:
                raise self.error(f"{what}: unknown parameter {key!r}", node)
            coeffs[key] = self.scalar(val, K, f"{what} d({key})")
        return OneFormK(K, coeffs)


def _form_matrix(K, r, entries):
    comps = {}
    for n in K.names:
        X = [[entries[p][q].coeffs.get(n, K.zero) for q in range(r)] for p in range(r)]
        if not la.is_zero_matrix(X):
            comps[n] = X
    return FormMatrix(K, r, comps)


def parse_connection(text):
    doc = load_document(text)
    rd = _Reader(text)
    rd.expect(doc, dict, "document")
    known = {"parameters", "rank", "points", "g", "eta", "eta0"}
    for key in doc:
        if key not in known:
            raise rd.error(f"unknown field {key!r}", doc)
    for key in ("parameters", "rank", "points", "g"):
        if key not in doc:
            raise rd.error(f"missing field {key!r}", doc)
    params = rd.expect(doc["parameters"], list, "parameters")
    names = []
    for p in params:
        rd.expect(p, str, "parameter name")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", p):
            raise rd.error(f"invalid parameter name {p!r}", p)
        if p == T:
            raise rd.error(f"parameter name {T!r} is reserved for the coordinate", p)
        if p in names:
            raise rd.error(f"duplicate parameter {p!r}", p)
        names.append(p)
    K = FunctionField.get(tuple(names))
    r = rd.expect(doc["rank"], int, "rank")
    if r < 1:
        raise rd.error("rank must be positive", doc)
    pts_node = rd.expect(doc["points"], list, "points")
    points = []
    for k, pt in enumerate(pts_node):
        rd.expect(pt, dict, f"point {k + 1}")
        if set(pt) != {"a", "m"}:
            raise rd.error(f"point {k + 1} needs exactly the fields 'a' and 'm'", pt)
        a = rd.scalar(pt["a"], K, f"point {k + 1} location")
        m = rd.expect(pt["m"], int, f"point {k + 1} multiplicity")
        if m < 1:
            raise rd.error(f"point {k + 1}: multiplicity must be positive", pt)
        points.append((a, m))
    N = len(points)
    g_node = rd.expect(doc["g"], list, "g")
    if len(g_node) != N:
        raise rd.error(f"g needs one entry per point ({N}), found {len(g_node)}", g_node)
    g = []
    for k, (gi, (_, m)) in enumerate(zip(g_node, points)):
        rd.expect(gi, list, f"g at point {k + 1}")
        if len(gi) != m:
            raise rd.error(f"g at point {k + 1}: expected {m} matrices, found {len(gi)}", gi)
        g.append([rd.matrix(X, r, f"g_{s + 1} at point {k + 1}",
                            lambda x, w: rd.scalar(x, K, w)) for s, X in enumerate(gi)])
    eta = []
    eta_node = doc.get("eta")
    if eta_node is not None:
        rd.expect(eta_node, list, "eta")
        if len(eta_node) != N:
            raise rd.error(f"eta needs one entry per point ({N}), found {len(eta_node)}", eta_node)
    for k, (_, m) in enumerate(points):
        M = m - 1 if m >= 2 else 1
        if eta_node is None:
            eta.append([FormMatrix(K, r) for _ in range(M)])
            continue
        ei = rd.expect(eta_node[k], list, f"eta at point {k + 1}")
        if len(ei) != M:
            raise rd.error(f"eta at point {k + 1}: expected {M} matrices, found {len(ei)}", ei)
        eta.append([_form_matrix(K, r, rd.matrix(X, r, f"eta_{s + 1} at point {k + 1}",
                                                 lambda x, w: rd.oneform(x, K, w)))
                    for s, X in enumerate(ei)])
    if doc.get("eta0") is not None:
        eta0 = _form_matrix(K, r, rd.matrix(doc["eta0"], r, "eta0",
                                            lambda x, w: rd.oneform(x, K, w)))
    else:
        eta0 = FormMatrix(K, r)
    return Connection(K, r, points, g, eta, eta0)


# ---------------------------------------------------------------------------
# rendering

def connection_document(C):
    K, r = C.K, C.r

    def mat(X):
        return [[render(x) for x in row] for row in X]

    def form_mat(F):
        out = [[{} for _ in range(r)] for _ in range(r)]
        for n in K.names:
            X = F.comps.get(n)
            if X is None:
                continue
            for p in range(r):
                for q in range(r):
                    if X[p][q]:
                        out[p][q][n] = render(X[p][q])
        return out

    return {
        "parameters": list(K.names),
        "rank": r,
        "points": [{"a": render(a), "m": m} for a, m in zip(C.points, C.mult)],
        "g": [[mat(X) for X in gi] for gi in C.g],
        "eta": [[form_mat(F) for F in ei] for ei in C.eta],
        "eta0": form_mat(C.eta0),
    }


def render_connection(C):
    return json.dumps(connection_document(C), indent=2, ensure_ascii=False)


def _point_label(C, i):
    return f"{i + 1} (a = {render(C.points[i])}, m = {C.mult[i]})"


def format_rhs(C, rhs):
    lines = [f"global: {rhs.global_}"]
    for i in sorted(rhs.residues):
        lines.append(f"residue {_point_label(C, i)}: {rhs.residues[i]}")
    lines.append(f"torsion: {rhs.torsion}")
    lines.append(f"rhs: {rhs.total}")
    return lines


def format_report(C, rep):
    lines = [f"point {_point_label(C, i)}: {pc.tag}" for i, pc in enumerate(rep.classes)]
    lines.append(f"lhs: {rep.lhs}")
    lines += format_rhs(C, rep.rhs)
    lines.append(f"difference: {rep.difference}")
    lines.append(f"certificate: {rep.certificate if rep.certificate is not None else 'none'}")
    lines.append(f"verdict: {'true' if rep.verdict else 'false'}")
    return lines


# ---------------------------------------------------------------------------
# commands

def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not valid UTF-8") from None


def _section(C, text):
    if text is None:
        return None
    Kt = line_field(C.K)
    f = parse_expression(text, Kt, _Origin(where="--section"))
    if not f:
        raise InputError("--section: the multiplier must be nonzero")
    return f


def cmd_check(args, out):
    C = parse_connection(_read(args.file))
    classes = [classify_point(C, i) for i in range(C.N)]
    for i, pc in enumerate(classes):
        extra = f" ({pc.diagnostics})" if pc.diagnostics else ""
        out.append(f"point {_point_label(C, i)}: {pc.tag}{extra}")
    vertical = is_vertical(C)
    out.append(f"vertical: {'yes' if vertical else 'no'}")
    out.append(f"dim H: {len(h_basis(C))}")
    check_preconditions(C)
    out.append("status: ok")
    return EXIT_OK


def cmd_lhs(args, out):
    C = parse_connection(_read(args.file))
    check_preconditions(C)
    out.append(str(gm_determinant_lhs(C)))
    return EXIT_OK


def cmd_rhs(args, out):
    C = parse_connection(_read(args.file))
    check_preconditions(C)
    out.extend(format_rhs(C, gm_determinant_rhs(C, _section(C, args.section))))
    return EXIT_OK


def cmd_verify(args, out):
    C = parse_connection(_read(args.file))
    rep = verify(C, _section(C, args.section))
    out.extend(format_report(C, rep))
    return EXIT_OK if rep.verdict else EXIT_MISMATCH


def cmd_mobius(args, out):
    C = parse_connection(_read(args.file))
    parts = args.map.split(",")
    if len(parts) != 4:
        raise InputError("--map needs four comma-separated expressions p,q,r,w")
    coeffs = [parse_expression(p, C.K, _Origin(where=f"--map entry {k + 1}"))
              for k, p in enumerate(parts)]
    out.append(render_connection(transport_mobius(C, *coeffs)))
    return EXIT_OK


def cmd_selftest(args, out):
    from .selftest import run_selftest
    ok = run_selftest(args.seed, args.count, out)
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser():
    ap = argparse.ArgumentParser(
        prog="gmdet",
        description="Exact check of the local formula for the determinant of the "
                    "Gauss-Manin connection of a connection on the projective line.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="validate a document and classify its points")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("lhs", help="the Gauss-Manin determinant as a 1-form")
    p.add_argument("file")
    p.set_defaults(func=cmd_lhs)
    for name, func, text in (("rhs", cmd_rhs, "the local formula with its breakdown"),
                             ("verify", cmd_verify, "compare both sides modulo dlog K^x")):
        p = sub.add_parser(name, help=text)
        p.add_argument("file")
        p.add_argument("--section", metavar="F",
                       help="multiplier f(t) of the default section dt/prod (t-a_j)^m_j")
        p.set_defaults(func=func)
    p = sub.add_parser("selftest", help="run the oracle suites on random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=cmd_selftest)
    p = sub.add_parser("mobius", help="transport along t = (p*s+q)/(r*s+w)")
    p.add_argument("file")
    p.add_argument("--map", required=True, metavar="p,q,r,w")
    p.set_defaults(func=cmd_mobius)
    return ap


def run(argv):
    """Returns (exit code, stdout text, stderr text)."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_INPUT), "", ""
    out = []
    try:
        code = args.func(args, out)
        err = ""
    except InputError as exc:
        code, err = EXIT_INPUT, f"error: {exc}"
    except PreconditionError as exc:
        code, err = EXIT_PRECONDITION, f"precondition violated ({type(exc).__name__}): {exc}"
    except GmdetError as exc:
        code, err = EXIT_MISMATCH, f"error: {exc}"
    text = "\n".join(out) + ("\n" if out else "")
    return code, text, (err + "\n" if err else "")


def main(argv=None):
    code, text, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
