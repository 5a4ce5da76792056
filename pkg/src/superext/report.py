"""Analysis reports: deterministic machine form plus a human rendering.

The machine form is JSON with sorted keys and canonical expression strings;
identical inputs produce byte-identical documents.  Every check outcome is
one of exact-zero / nonzero / pass / fail / skipped, and outcomes flagged
`guaranteed` are those the theory promises for any well-formed input, so a
failure there signals a bug or an invalid system rather than a verdict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

EXIT_EXTENDABLE = 0
EXIT_NON_EXTENDABLE = 10
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_FAILURE = 2


@dataclass
class CheckOutcome:
    name: str
    status: str            # exact-zero | nonzero | pass | fail | skipped
    guaranteed: bool = False
    detail: str = ""
    witness: str = ""

    def as_dict(self):
        d = {"name": self.name, "status": self.status, "guaranteed": self.guaranteed}
        if self.detail:
            d["detail"] = self.detail
        if self.witness:
            d["witness"] = self.witness
        return d

    @property
    def failed(self) -> bool:
        return self.status in ("nonzero", "fail")


@dataclass
class AnalysisReport:
    input_echo: dict = field(default_factory=dict)
    structure: dict = field(default_factory=dict)
    verdict: str = ""
    verdict_witness: str = ""
    checks: list = field(default_factory=list)       # list[CheckOutcome]
    killing: list = field(default_factory=list)      # per-tensor dicts
    extension: dict = field(default_factory=dict)

    def exit_code(self) -> int:
        if any(c.guaranteed and c.failed for c in self.checks):
            return EXIT_INTERNAL_FAILURE
        return EXIT_EXTENDABLE if self.verdict == "Extendable" else EXIT_NON_EXTENDABLE

    def to_json(self) -> str:
        doc = {
            "input": self.input_echo,
            "structure": self.structure,
            "verdict": self.verdict,
            "verdict_witness": self.verdict_witness,
            "checks": [c.as_dict() for c in self.checks],
            "killing": self.killing,
            "extension": self.extension,
            "exit_code": self.exit_code(),
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @staticmethod
    def from_json(text: str) -> dict:
        return json.loads(text)

    # -- human rendering -------------------------------------------------------

    def human(self) -> str:
        lines = []
        inp = self.input_echo
        lines.append(f"chart: dim {inp.get('dim')} coords {' '.join(inp.get('coords', []))}")
        for a in inp.get("atoms", []):
            lines.append(f"  atom {a['name']}^2 = {a['radicand']}")
        lines.append(f"metric: {inp.get('metric_kind', 'identity')}")
        lines.append("potentials:")
        for p in inp.get("potentials", []):
            lines.append(f"  {p}")
        lines.append("")
        if self.structure:
            lines.append("trace 1-forms:")
            lines.append(f"  d = ({', '.join(self.structure['d'])})")
            lines.append(f"  s = ({', '.join(self.structure['s'])})")
            lines.append(f"  t = ({', '.join(self.structure['t'])})")
            nz = [f"N[{e['index']}] = {e['value']}" for e in self.structure.get("N_nonzero", [])]
            if nz:
                lines.append("obstruction components (nonzero):")
                for row in nz:
                    lines.append(f"  {row}")
            lines.append("")
        if self.verdict == "Extendable":
            lines.append("verdict: N vanishes: extendable")
        elif self.verdict:
            lines.append(f"verdict: N nonzero: non-extendable (witness {self.verdict_witness})")
        lines.append("")
        lines.append("checks:")
        for c in self.checks:
            mark = {"exact-zero": "ok", "pass": "ok", "skipped": "--",
                    "nonzero": "XX", "fail": "XX"}[c.status]
            extra = f" [{c.detail}]" if c.detail else ""
            wit = f" witness: {c.witness}" if c.witness and c.failed else ""
            lines.append(f"  [{mark}] {c.name}: {c.status}{extra}{wit}")
        if self.killing:
            lines.append("")
            lines.append("killing tensors:")
            for entry in self.killing:
                lines.append(f"  #{entry['index']}: defining={entry['defining']}"
                             f" compatibility={entry['compatibility']}"
                             f" prolongation={entry['prolongation']}")
        if self.extension:
            lines.append("")
            lines.append("extension:")
            lines.append(f"  family containment residual: {self.extension['family_residual']}")
            if self.extension.get("fit_ok"):
                coeffs = self.extension["fit_coefficients"]
                pretty = ", ".join(f"{k} -> {v}" for k, v in sorted(coeffs.items()))
                lines.append(f"  fit: {pretty} (residual {self.extension['fit_residual']})")
            else:
                lines.append(f"  fit: {self.extension.get('fit_message', 'not attempted')}")
        lines.append("")
        lines.append(f"exit code: {self.exit_code()}")
        return "\n".join(lines)


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


def samples_table(chart_coords, targets, states) -> list:
    """Tabular text: one row per grid point; coords, V, V_,k, laplacian."""
    header = list(chart_coords) + ["V"] + [f"V_{c}" for c in chart_coords] + ["lap"]
    rows = [" ".join(header)]
    for tgt, vec in zip(targets, states):
        cells = [fmt17(v) for v in tgt] + [fmt17(vec[0])] \
            + [fmt17(v) for v in vec[1:1 + len(chart_coords)]] + [fmt17(vec[-1])]
        rows.append(" ".join(cells))
    return rows
