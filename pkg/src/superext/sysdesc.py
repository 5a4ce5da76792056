"""System description files: the engine's input document.

Line-oriented blocks; `#` starts a comment, blank lines are ignored.

    chart
      dim 3
      coords x y z
      atom r = x^2+y^2+z^2        # optional, repeatable
    end

    metric identity               # or a block of n comma-separated rows

    potentials                    # exactly n+1 expression lines
      1
      1/x^2
      ...
    end

    killing                       # optional, repeatable; n rows per tensor
      y^2, -x*y, 0
      -x*y, x^2, 0
      0, 0, 0
    end

    analysis                      # optional
      base 1, 1, 1
      grid 3x3x3
      spacing 1/4
      tol 1e-8
      witness -3*ln(x*y*z)        # optional exactness candidate for the trace form
      candidate osc = x^2+y^2+z^2 # optional, repeatable fit dictionary
    end

Unknown directives or keys are rejected with their line number.  sqrt() in
any expression auto-declares a radical atom when its radicand is new.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .chart import Chart, RadicalAtom
from .errors import DescriptionError
from .expr import Expr, normalize
from .parser import parse_declaring, parse_expr
from .rational import CanonicalRational as CR
from .tensor import Metric, Tensor


@dataclass
class AnalysisOptions:
    base: list = field(default_factory=list)        # Fractions; defaults to all-ones
    grid: tuple = (3, 3, 3)
    spacing: Fraction = Fraction(1, 4)
    tol: float = 1e-8
    witness: Expr = None
    candidates: dict = field(default_factory=dict)  # label -> Expr

    def base_point(self, dim):
        if self.base:
            return [float(v) for v in self.base]
        return [1.0] * dim

    def grid_points(self, dim):
        dims = self.grid
        if len(dims) != dim:
            raise DescriptionError(f"grid has {len(dims)} axes for dimension {dim}")
        base = self.base_point(dim)
        h = float(self.spacing)
        pts = []
        def rec(prefix, axis):
            if axis == dim:
                pts.append(list(prefix))
                return
            for j in range(dims[axis]):
                off = (j - (dims[axis] - 1) / 2.0) * h
                rec(prefix + [base[axis] + off], axis + 1)
        rec([], 0)
        return pts


@dataclass
class SystemDescription:
    chart: Chart
    metric: Metric
    potentials: list                 # Expr, length n+1
    killing: list                    # list[Tensor] (l, l) symmetric
    options: AnalysisOptions
    source_text: str


def _tokens(line):
    return line.split()


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.i = 0

    def next_content(self):
        while self.i < len(self.lines):
            raw = self.lines[self.i]
            self.i += 1
            line = raw.split("#", 1)[0].strip()
            if line:
                return line, self.i
        return None, self.i

    def peek_is_end(self):
        save = self.i
        line, _ = self.next_content()
        self.i = save
        return line == "end"


def load_description(text: str) -> SystemDescription:
    rd = _Reader(text)
    chart = None
    metric_rows = None
    metric_identity = False
    potentials = None
    killing_blocks = []
    options = AnalysisOptions()
    seen = set()

    while True:
        line, ln = rd.next_content()
        if line is None:
            break
        head = _tokens(line)[0]
        if head == "chart":
            if "chart" in seen:
                raise DescriptionError(f"line {ln}: duplicate chart block")
            seen.add("chart")
            chart = _read_chart(rd, ln)
        elif head == "metric":
            if "metric" in seen:
                raise DescriptionError(f"line {ln}: duplicate metric")
            seen.add("metric")
            rest = line[len("metric"):].strip()
            if rest == "identity":
                metric_identity = True
            elif rest == "":
                metric_rows = _read_rows(rd, ln, "metric")
            else:
                raise DescriptionError(f"line {ln}: metric must be 'identity' or a block")
        elif head == "potentials":
            if "potentials" in seen:
                raise DescriptionError(f"line {ln}: duplicate potentials block")
            seen.add("potentials")
            potentials = _read_exprs(rd, ln, "potentials")
        elif head == "killing":
            killing_blocks.append(_read_rows(rd, ln, "killing"))
        elif head == "analysis":
            if "analysis" in seen:
                raise DescriptionError(f"line {ln}: duplicate analysis block")
            seen.add("analysis")
            _read_analysis(rd, ln, options)
        else:
            raise DescriptionError(f"line {ln}: unknown directive {head!r}")

    if chart is None:
        raise DescriptionError("missing chart block")
    if potentials is None:
        raise DescriptionError("missing potentials block")

    # parse every expression, threading the chart through for new atoms
    work = chart["chart"]
    n = work.dim

    def parse_thread(txt, where):
        nonlocal work
        try:
            e, work = parse_declaring(txt, work)
            return e
        except Exception as exc:
            raise DescriptionError(f"{where}: {exc}") from exc

    metric_exprs = None
    if not metric_identity and metric_rows is not None:
        if len(metric_rows) != n or any(len(r) != n for r in metric_rows):
            raise DescriptionError(f"metric block must be {n} rows of {n} entries")
        metric_exprs = [[parse_thread(e, f"metric[{i}][{j}]")
                         for j, e in enumerate(row)] for i, row in enumerate(metric_rows)]
    if len(potentials) != n + 1:
        raise DescriptionError(
            f"potentials block needs {n + 1} entries for dimension {n}, got {len(potentials)}")
    pot_exprs = [parse_thread(p, f"potential {i}") for i, p in enumerate(potentials)]
    killing_exprs = []
    for bi, rows in enumerate(killing_blocks):
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DescriptionError(f"killing block {bi} must be {n} rows of {n} entries")
        killing_exprs.append([[parse_thread(e, f"killing[{bi}][{i}][{j}]")
                               for j, e in enumerate(row)] for i, row in enumerate(rows)])
    cand_exprs = {}
    for label, txt in options.candidates.items():
        cand_exprs[label] = parse_thread(txt, f"candidate {label!r}")
    if options.witness is not None:
        options.witness = parse_thread(options.witness, "witness")
    options.candidates = cand_exprs

    final_chart = work
    if metric_identity or metric_exprs is None:
        metric = Metric.euclidean(final_chart)
    else:
        g = Tensor.zeros(final_chart, ("l", "l"))
        for i in range(n):
            for j in range(n):
                g.comp[i, j] = normalize(metric_exprs[i][j], final_chart)
        metric = Metric(final_chart, g)

    ktensors = []
    for rows in killing_exprs:
        t = Tensor.zeros(final_chart, ("l", "l"))
        for i in range(n):
            for j in range(n):
                t.comp[i, j] = normalize(rows[i][j], final_chart)
        ktensors.append(t)

    if options.base and len(options.base) != n:
        raise DescriptionError(f"analysis base needs {n} coordinates")

    return SystemDescription(final_chart, metric, pot_exprs, ktensors, options, text)


def _read_chart(rd, start_ln):
    dim = None
    coords = None
    atoms = []
    while True:
        line, ln = rd.next_content()
        if line is None:
            raise DescriptionError(f"line {start_ln}: chart block never ends")
        if line == "end":
            break
        toks = _tokens(line)
        if toks[0] == "dim":
            if len(toks) != 2 or not toks[1].isdigit():
                raise DescriptionError(f"line {ln}: dim needs one integer")
            dim = int(toks[1])
        elif toks[0] == "coords":
            coords = toks[1:]
        elif toks[0] == "atom":
            body = line[len("atom"):].strip()
            if "=" not in body:
                raise DescriptionError(f"line {ln}: atom needs 'name = polynomial'")
            name, poly_txt = (s.strip() for s in body.split("=", 1))
            atoms.append((name, poly_txt, ln))
        else:
            raise DescriptionError(f"line {ln}: unknown chart key {toks[0]!r}")
    if dim is None or coords is None:
        raise DescriptionError(f"line {start_ln}: chart block needs dim and coords")
    if len(coords) != dim:
        raise DescriptionError(f"line {start_ln}: got {len(coords)} coords for dim {dim}")
    try:
        ch = Chart(tuple(coords))
    except ValueError as exc:
        raise DescriptionError(f"line {start_ln}: {exc}") from exc
    for name, poly_txt, ln in atoms:
        try:
            e = parse_expr(poly_txt, ch)
            cr = normalize(e, ch)
        except Exception as exc:
            raise DescriptionError(f"line {ln}: bad atom polynomial: {exc}") from exc
        if not (cr.den.is_const and cr.den.const_value() == 1) or cr.num.has_atoms():
            raise DescriptionError(f"line {ln}: atom radicand must be a polynomial")
        try:
            ch = ch.with_atom(RadicalAtom.make(
                name, {m[:ch.dim]: c for m, c in cr.num.terms.items()}))
        except ValueError as exc:
            raise DescriptionError(f"line {ln}: {exc}") from exc
    return {"chart": ch}


def _read_rows(rd, start_ln, what):
    rows = []
    while True:
        line, ln = rd.next_content()
        if line is None:
            raise DescriptionError(f"line {start_ln}: {what} block never ends")
        if line == "end":
            return rows
        rows.append([cell.strip() for cell in line.split(",")])


def _read_exprs(rd, start_ln, what):
    out = []
    while True:
        line, ln = rd.next_content()
        if line is None:
            raise DescriptionError(f"line {start_ln}: {what} block never ends")
        if line == "end":
            return out
        out.append(line)


def _read_analysis(rd, start_ln, options: AnalysisOptions):
    while True:
        line, ln = rd.next_content()
        if line is None:
            raise DescriptionError(f"line {start_ln}: analysis block never ends")
        if line == "end":
            return
        toks = _tokens(line)
        key = toks[0]
        if key == "base":
            body = line[len("base"):].strip()
            try:
                options.base = [Fraction(v.strip()) for v in body.split(",")]
            except ValueError as exc:
                raise DescriptionError(f"line {ln}: bad base point: {exc}") from exc
        elif key == "grid":
            if len(toks) != 2:
                raise DescriptionError(f"line {ln}: grid needs AxBxC")
            try:
                options.grid = tuple(int(v) for v in toks[1].lower().split("x"))
            except ValueError as exc:
                raise DescriptionError(f"line {ln}: bad grid spec: {exc}") from exc
            if any(v < 1 for v in options.grid):
                raise DescriptionError(f"line {ln}: grid axes must be positive")
        elif key == "spacing":
            if len(toks) != 2:
                raise DescriptionError(f"line {ln}: spacing needs one rational")
            try:
                options.spacing = Fraction(toks[1])
            except ValueError as exc:
                raise DescriptionError(f"line {ln}: bad spacing: {exc}") from exc
        elif key == "tol":
            if len(toks) != 2:
                raise DescriptionError(f"line {ln}: tol needs one float")
            try:
                options.tol = float(toks[1])
            except ValueError as exc:
                raise DescriptionError(f"line {ln}: bad tol: {exc}") from exc
        elif key == "witness":
            options.witness = line[len("witness"):].strip()
        elif key == "candidate":
            body = line[len("candidate"):].strip()
            if "=" not in body:
                raise DescriptionError(f"line {ln}: candidate needs 'label = expression'")
            label, txt = (s.strip() for s in body.split("=", 1))
            if label in options.candidates:
                raise DescriptionError(f"line {ln}: duplicate candidate {label!r}")
            options.candidates[label] = txt
        else:
            raise DescriptionError(f"line {ln}: unknown analysis key {key!r}")
