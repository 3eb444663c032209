"""Line-oriented text formats for the CLI.

A document is a sequence of named blocks:

    begin KIND NAME
    ...statements...
    end

with kinds chain, map, simplicial, cdga, bundle, wittspec, and witness.
Rational entries are written p or p/q; matrices are row-major, one row per
line, with shapes fixed by the declared ranks; omitted matrices are zero.
Blocks may reference earlier blocks by name.  Parsing the emission of a parse
is the identity, and emission is byte-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q

from .qlinalg import RationalMatrix
from .chain import ChainComplex, ChainMap
from .simplicial import SimplicialComplex, SimplicialPair
from .sullivan import CDGA, FreeCGA
from .duality import LinkBundleData


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class WittSpecDoc:
    """Unresolved depth-one space description: named references plus data."""

    n: int
    regular: str
    boundary_map: str
    strata: tuple[str, ...]
    regular_pair: str | None
    mu: tuple | None


@dataclass
class WitnessDoc:
    kind: str
    degree: int | None
    vectors: tuple[tuple[Q, ...], ...]
    labels: tuple[str, ...]


@dataclass
class InputDocument:
    kind: str
    name: str
    payload: object


def _rat(tok: str, line_no: int) -> Q:
    try:
        return Q(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line_no, f"not a rational number: {tok!r}")


def _fmt_rat(x: Q) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class _Lines:
    def __init__(self, text: str):
        self.rows = []
        for no, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                self.rows.append((no, stripped))
        self.pos = 0

    def peek(self):
        return self.rows[self.pos] if self.pos < len(self.rows) else (None, None)

    def next(self):
        no, line = self.peek()
        if line is None:
            raise ParseError(0, "unexpected end of document")
        self.pos += 1
        return no, line

    def done(self):
        return self.pos >= len(self.rows)


def parse_documents(text: str) -> list[InputDocument]:
    """Parse all blocks, resolving references against earlier blocks."""
    lines = _Lines(text)
    docs: list[InputDocument] = []
    table: dict[str, InputDocument] = {}
    while not lines.done():
        no, line = lines.next()
        parts = line.split()
        if parts[0] != "begin" or len(parts) != 3:
            raise ParseError(no, f"expected 'begin KIND NAME', found {line!r}")
        kind, name = parts[1], parts[2]
        if name in table:
            raise ParseError(no, f"duplicate block name {name!r}")
        parser = _BLOCK_PARSERS.get(kind)
        if parser is None:
            raise ParseError(no, f"unknown block kind {kind!r}")
        payload = parser(lines, table)
        doc = InputDocument(kind, name, payload)
        docs.append(doc)
        table[name] = doc
    return docs


def parse(text: str) -> InputDocument:
    docs = parse_documents(text)
    if len(docs) != 1:
        raise ParseError(0, f"expected exactly one block, found {len(docs)}")
    return docs[0]


def _expect_end(lines: _Lines):
    no, line = lines.next()
    if line != "end":
        raise ParseError(no, f"expected 'end', found {line!r}")


def _read_matrix(lines: _Lines, rows: int, cols: int, context: str) -> RationalMatrix:
    data = []
    for _ in range(rows):
        no, line = lines.next()
        toks = line.split()
        if len(toks) != cols:
            raise ParseError(no, f"{context}: expected {cols} entries, found {len(toks)}")
        data.append([_rat(t, no) for t in toks])
    return RationalMatrix(data, cols=cols)


def _resolve(table, name: str, kind: str, no: int):
    doc = table.get(name)
    if doc is None:
        raise ParseError(no, f"unresolved reference {name!r}")
    if doc.kind != kind:
        raise ParseError(no, f"{name!r} is a {doc.kind} block, expected {kind}")
    return doc.payload


def _parse_chain(lines: _Lines, table) -> ChainComplex:
    bottom = top = None
    ranks = None
    boundary = {}
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        if toks[0] == "degrees" and len(toks) == 3:
            bottom, top = int(toks[1]), int(toks[2])
        elif toks[0] == "ranks":
            ranks = [int(t) for t in toks[1:]]
        elif toks[0] == "boundary" and len(toks) == 2:
            if ranks is None or bottom is None:
                raise ParseError(no, "boundary before degrees/ranks")
            d = int(toks[1])
            if not (bottom + 1 <= d <= top):
                raise ParseError(no, f"boundary degree {d} out of range")
            r = ranks[d - 1 - bottom]
            c = ranks[d - bottom]
            boundary[d] = _read_matrix(lines, r, c, f"boundary at degree {d}")
        else:
            raise ParseError(no, f"unknown chain statement {line!r}")
    if bottom is None or ranks is None:
        raise ParseError(no, "chain block needs degrees and ranks")
    if len(ranks) != top - bottom + 1:
        raise ParseError(no, "rank count does not match the degree range")
    try:
        return ChainComplex(bottom, ranks, boundary)
    except ValueError as exc:
        raise ParseError(no, str(exc))


def _parse_map(lines: _Lines, table) -> ChainMap:
    source = target = None
    comps = {}
    pending = []
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        if toks[0] == "source" and len(toks) == 2:
            source = _resolve(table, toks[1], "chain", no)
        elif toks[0] == "target" and len(toks) == 2:
            target = _resolve(table, toks[1], "chain", no)
        elif toks[0] == "component" and len(toks) == 2:
            if source is None or target is None:
                raise ParseError(no, "component before source/target")
            d = int(toks[1])
            comps[d] = _read_matrix(lines, target.rank(d), source.rank(d),
                                    f"component at degree {d}")
        else:
            raise ParseError(no, f"unknown map statement {line!r}")
    if source is None or target is None:
        raise ParseError(no, "map block needs source and target")
    try:
        return ChainMap(source, target, comps)
    except ValueError as exc:
        raise ParseError(no, str(exc))


def _parse_simplicial(lines: _Lines, table):
    vertices = None
    facets = []
    sub_facets = None
    current = facets
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        if toks[0] == "vertices" and len(toks) == 2:
            vertices = int(toks[1])
        elif toks[0] == "facets" and len(toks) == 1:
            current = facets
        elif toks[0] == "sub" and len(toks) == 1:
            sub_facets = []
            current = sub_facets
        else:
            try:
                current.append(tuple(int(t) for t in toks))
            except ValueError:
                raise ParseError(no, f"expected vertex numbers, found {line!r}")
    if vertices is None:
        raise ParseError(no, "simplicial block needs a vertex count")
    try:
        ambient = SimplicialComplex.from_facets(facets, vertex_count=vertices)
        if sub_facets is None:
            return ambient
        sub = SimplicialComplex.from_facets(sub_facets, vertex_count=vertices) \
            if sub_facets else SimplicialComplex(vertices, [()])
        return SimplicialPair(ambient, sub)
    except ValueError as exc:
        raise ParseError(no, str(exc))


def _parse_poly_tokens(rhs: str, no: int) -> list[tuple[Q, tuple[str, ...]]]:
    """POLY := 0 | term (('+'|'-') term)*; term := [coeff '*'] name ('*' name)*."""
    rhs = rhs.strip()
    if rhs == "0":
        return []
    terms = []
    sign = Q(1)
    buf = ""
    chunks = []
    for tok in rhs.replace("+", " + ").replace("- ", " - ").split():
        chunks.append(tok)
    # simple split on +/- tokens
    current: list[str] = []
    pending_sign = Q(1)
    for tok in chunks:
        if tok == "+":
            if current:
                terms.append((pending_sign, current))
            current, pending_sign = [], Q(1)
        elif tok == "-":
            if current:
                terms.append((pending_sign, current))
            current, pending_sign = [], Q(-1)
        else:
            current.extend(t for t in tok.split("*") if t)
    if current:
        terms.append((pending_sign, current))
    out = []
    for sgn, factors in terms:
        coeff = sgn
        names = []
        for f in factors:
            if f and (f[0].isdigit() or f[0] == "-" or "/" in f):
                coeff *= _rat(f, no)
            else:
                names.append(f)
        out.append((coeff, tuple(names)))
    return out


def _parse_cdga(lines: _Lines, table):
    typ = None
    cap = None
    generators = []
    elements = []
    d_stmts = {}
    products = {}
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        if toks[0] == "type" and len(toks) == 2:
            typ = toks[1]
        elif toks[0] == "cap" and len(toks) == 2:
            cap = int(toks[1])
        elif toks[0] == "generator" and len(toks) == 3:
            generators.append((toks[1], int(toks[2])))
        elif toks[0] == "element" and len(toks) == 3:
            elements.append((toks[1], int(toks[2])))
        elif toks[0] == "d" and len(toks) >= 3 and toks[2] == "=":
            d_stmts[toks[1]] = (_parse_poly_tokens(line.split("=", 1)[1], no), no)
        elif toks[0] == "product" and "=" in line:
            lhs, rhs = line.split("=", 1)
            lhs_toks = lhs.split()
            if len(lhs_toks) != 4 or lhs_toks[2] != "*":
                raise ParseError(no, f"expected 'product A * B = POLY', found {line!r}")
            products[(lhs_toks[1], lhs_toks[3])] = (_parse_poly_tokens(rhs, no), no)
        else:
            raise ParseError(no, f"unknown cdga statement {line!r}")
    if cap is None or typ not in ("free", "table"):
        raise ParseError(no, "cdga block needs 'type free|table' and a cap")
    if typ == "free":
        names = [n for n, _ in generators]
        diffs = []
        for name, _ in generators:
            poly = {}
            for coeff, factors in d_stmts.get(name, ([], no))[0]:
                mono = tuple(sorted(names.index(f) for f in factors))
                poly[mono] = poly.get(mono, Q(0)) + coeff
            diffs.append({m: c for m, c in poly.items() if c})
        try:
            return FreeCGA(generators, diffs, cap=cap)
        except ValueError as exc:
            raise ParseError(no, str(exc))
    # table type
    prods = {}
    for (a, b), (poly, pno) in products.items():
        expansion = {}
        for coeff, factors in poly:
            if len(factors) != 1:
                raise ParseError(pno, "table products expand in basis elements")
            expansion[factors[0]] = expansion.get(factors[0], Q(0)) + coeff
        prods[(a, b)] = {k: v for k, v in expansion.items() if v}
    diffs = {}
    for name, (poly, dno) in d_stmts.items():
        expansion = {}
        for coeff, factors in poly:
            if len(factors) != 1:
                raise ParseError(dno, "table differentials expand in basis elements")
            expansion[factors[0]] = expansion.get(factors[0], Q(0)) + coeff
        diffs[name] = {k: v for k, v in expansion.items() if v}
    try:
        return CDGA.build(cap, elements, products=prods, differentials=diffs)
    except ValueError as exc:
        raise ParseError(no, str(exc))


def _parse_bundle(lines: _Lines, table) -> LinkBundleData:
    fields = {}
    vectors = {}
    label = None
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        key = toks[0]
        if key in ("fiber", "monodromy", "total", "truncated", "truncation-map"):
            fields[key] = (toks[1], no)
        elif key == "fiber-dim":
            fields[key] = (int(toks[1]), no)
        elif key == "order":
            fields[key] = (int(toks[1]), no)
        elif key in ("fiber-fundamental", "total-fundamental"):
            vectors[key] = tuple(_rat(t, no) for t in toks[1:])
        elif key == "label":
            label = " ".join(toks[1:])
        else:
            raise ParseError(no, f"unknown bundle statement {line!r}")
    if "fiber" not in fields or "fiber-dim" not in fields:
        raise ParseError(no, "bundle block needs fiber and fiber-dim")
    fiber = _resolve(table, fields["fiber"][0], "chain", fields["fiber"][1])
    c = fields["fiber-dim"][0]
    monodromy = None
    order = fields.get("order", (1, no))[0]
    precomputed = None
    if "monodromy" in fields:
        name, mno = fields["monodromy"]
        monodromy = ChainMap.identity(fiber) if name == "identity" else \
            _resolve(table, name, "map", mno)
    if "total" in fields:
        for key in ("truncated", "truncation-map"):
            if key not in fields:
                raise ParseError(no, f"precomputed bundle needs {key}")
        total = _resolve(table, fields["total"][0], "chain", fields["total"][1])
        truncated = _resolve(table, fields["truncated"][0], "chain",
                             fields["truncated"][1])
        tmap = _resolve(table, fields["truncation-map"][0], "map",
                        fields["truncation-map"][1])
        precomputed = (total, truncated, tmap)
    return LinkBundleData(fiber=fiber, fiber_dim=c, monodromy=monodromy,
                          order=order, precomputed=precomputed,
                          total_fundamental=vectors.get("total-fundamental"),
                          fiber_fundamental=vectors.get("fiber-fundamental"),
                          label=label or "stratum")


def _parse_wittspec(lines: _Lines, table) -> WittSpecDoc:
    n = None
    regular = None
    boundary_map = None
    regular_pair = None
    strata = []
    mu = None
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        if toks[0] == "n" and len(toks) == 2:
            n = int(toks[1])
        elif toks[0] == "regular" and len(toks) == 2:
            _resolve(table, toks[1], "chain", no)
            regular = toks[1]
        elif toks[0] == "boundary-map" and len(toks) == 2:
            _resolve(table, toks[1], "map", no)
            boundary_map = toks[1]
        elif toks[0] == "regular-pair" and len(toks) == 2:
            payload = _resolve(table, toks[1], "simplicial", no)
            if not isinstance(payload, SimplicialPair):
                raise ParseError(no, "regular-pair needs a simplicial block with sub")
            regular_pair = toks[1]
        elif toks[0] == "stratum" and len(toks) == 2:
            _resolve(table, toks[1], "bundle", no)
            strata.append(toks[1])
        elif toks[0] == "mu":
            mu = tuple(_rat(t, no) for t in toks[1:])
        else:
            raise ParseError(no, f"unknown wittspec statement {line!r}")
    if n is None or regular is None:
        raise ParseError(no, "wittspec needs n and a regular part")
    if strata and boundary_map is None:
        raise ParseError(no, "wittspec with strata needs a boundary-map")
    return WittSpecDoc(n, regular, boundary_map, tuple(strata), regular_pair, mu)


def _parse_witness(lines: _Lines, table) -> WitnessDoc:
    kind = None
    degree = None
    vectors = []
    labels = []
    while True:
        no, line = lines.next()
        if line == "end":
            break
        toks = line.split()
        if toks[0] == "kind" and len(toks) == 2:
            kind = toks[1]
        elif toks[0] == "degree" and len(toks) == 2:
            degree = int(toks[1])
        elif toks[0] == "vector":
            vectors.append(tuple(_rat(t, no) for t in toks[1:]))
            labels.append("")
        elif toks[0] == "labeled-vector" and len(toks) >= 2:
            labels.append(toks[1])
            vectors.append(tuple(_rat(t, no) for t in toks[2:]))
        else:
            raise ParseError(no, f"unknown witness statement {line!r}")
    if kind is None:
        raise ParseError(no, "witness block needs a kind")
    return WitnessDoc(kind, degree, tuple(vectors), tuple(labels))


_BLOCK_PARSERS = {
    "chain": _parse_chain,
    "map": _parse_map,
    "simplicial": _parse_simplicial,
    "cdga": _parse_cdga,
    "bundle": _parse_bundle,
    "wittspec": _parse_wittspec,
    "witness": _parse_witness,
}


# --- emission ---------------------------------------------------------------------

def _emit_matrix(out: list[str], m: RationalMatrix):
    for row in m.entries:
        out.append(" ".join(_fmt_rat(e) for e in row))


def emit_chain(name: str, c: ChainComplex) -> str:
    out = [f"begin chain {name}",
           f"degrees {c.bottom} {c.top}",
           "ranks " + " ".join(str(r) for r in c.ranks)]
    for d in range(c.bottom + 1, c.top + 1):
        m = c.d(d)
        if not m.is_zero():
            out.append(f"boundary {d}")
            _emit_matrix(out, m)
    out.append("end")
    return "\n".join(out) + "\n"


def emit_map(name: str, f: ChainMap, source_name: str, target_name: str) -> str:
    out = [f"begin map {name}",
           f"source {source_name}",
           f"target {target_name}"]
    for d in f.source.degrees():
        m = f.component(d)
        if not m.is_zero():
            out.append(f"component {d}")
            _emit_matrix(out, m)
    out.append("end")
    return "\n".join(out) + "\n"


def emit_simplicial(name: str, k: SimplicialComplex,
                    sub: SimplicialComplex | None = None) -> str:
    from .fixtures import _maximal_simplices
    out = [f"begin simplicial {name}",
           f"vertices {k.vertex_count}",
           "facets"]
    for s in sorted(_maximal_simplices(k)):
        out.append(" ".join(str(v) for v in s))
    if sub is not None:
        out.append("sub")
        for s in sorted(_maximal_simplices(sub)):
            out.append(" ".join(str(v) for v in s))
    out.append("end")
    return "\n".join(out) + "\n"


def _fmt_poly_free(m: FreeCGA, poly) -> str:
    if not poly:
        return "0"
    parts = []
    for mono, coeff in sorted(poly.items()):
        factors = "*".join(m.generators[g][0] for g in mono) if mono else "1"
        parts.append(factors if coeff == 1 else f"{_fmt_rat(coeff)}*{factors}")
    return " + ".join(parts)


def emit_free_cdga(name: str, m: FreeCGA) -> str:
    out = [f"begin cdga {name}",
           "type free",
           f"cap {m.cap}"]
    for gname, deg in m.generators:
        out.append(f"generator {gname} {deg}")
    for g, poly in enumerate(m.d_polys):
        if poly:
            out.append(f"d {m.generators[g][0]} = {_fmt_poly_free(m, poly)}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_table_cdga(name: str, a: CDGA) -> str:
    out = [f"begin cdga {name}",
           "type table",
           f"cap {a.cap}"]
    for d in range(1, a.cap + 1):
        for nm in a.basis.get(d, ()):
            out.append(f"element {nm} {d}")

    def basis_name(deg, idx):
        return a.basis[deg][idx]

    for d in range(1, a.cap + 1):
        for i, nm in enumerate(a.basis.get(d, ())):
            dv = a.d_apply(d, tuple(Q(1) if k == i else Q(0)
                                    for k in range(a.dim(d))))
            terms = [(basis_name(d + 1, k), v) for k, v in enumerate(dv) if v]
            if terms:
                rhs = " + ".join(nm2 if v == 1 else f"{_fmt_rat(v)}*{nm2}"
                                 for nm2, v in terms)
                out.append(f"d {nm} = {rhs}")
    emitted = set()
    for i in range(1, a.cap + 1):
        for j in range(i, a.cap + 1 - i):
            for ai in range(a.dim(i)):
                for bj in range(a.dim(j)):
                    if i == j and bj < ai:
                        continue
                    v = a.product_basis(i, ai, j, bj)
                    key = (i, ai, j, bj)
                    if key in emitted:
                        continue
                    emitted.add(key)
                    terms = [(basis_name(i + j, k), e) for k, e in enumerate(v) if e]
                    lhs = f"product {basis_name(i, ai)} * {basis_name(j, bj)}"
                    if terms:
                        rhs = " + ".join(nm2 if e == 1 else f"{_fmt_rat(e)}*{nm2}"
                                         for nm2, e in terms)
                    else:
                        rhs = "0"
                    out.append(f"{lhs} = {rhs}")
    out.append("end")
    return "\n".join(out) + "\n"


def emit_witness(name: str, kind: str, degree: int | None,
                 vectors, labels=None) -> str:
    out = [f"begin witness {name}", f"kind {kind}"]
    if degree is not None:
        out.append(f"degree {degree}")
    labels = labels or [""] * len(vectors)
    for lab, v in zip(labels, vectors):
        body = " ".join(_fmt_rat(Q(e)) for e in v)
        if lab:
            out.append(f"labeled-vector {lab} {body}".rstrip())
        else:
            out.append(f"vector {body}".rstrip())
    out.append("end")
    return "\n".join(out) + "\n"
