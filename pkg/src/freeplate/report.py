"""Machine-readable pass/fail records for grid-checked inequalities.

A report stores the worst margin seen over a scan grid together with the
point where it occurred, so a failed check is reproducible and a passed
check shows how much room it had.
"""

from dataclasses import dataclass, field


def format_float(x):
    return format(float(x), ".17g")


def _clean(text):
    if "," in text or "\n" in text:
        raise ValueError("report text fields may not contain ',' or newlines")
    return text


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one grid-checked inequality or equality.

    Parameters
    ----------
    lemma_id : str
        Identifier of the checked statement, e.g. ``"P-nonneg[d=3]"``.
    passed : bool
        Whether the check succeeded; tied to ``worst_margin`` below.
    worst_margin : float
        For one-sided checks, the smallest slack seen (amount by which the
        inequality held); for equality checks, the signed deviation of
        largest magnitude.
    worst_point : tuple of float
        Coordinates where the worst margin occurred; may be empty for
        scalar spot checks.
    grid_spec : str
        Human-readable description of the scan grid.
    tolerance : float
        Pass threshold.
    check_kind : str
        ``"one-sided"`` (passed iff worst_margin > tolerance) or
        ``"equality"`` (passed iff \\|worst_margin\\| <= tolerance).
    """

    lemma_id: str
    passed: bool
    worst_margin: float
    worst_point: tuple = field(default=())
    grid_spec: str = ""
    tolerance: float = 0.0
    check_kind: str = "one-sided"

    def __post_init__(self):
        _clean(self.lemma_id)
        _clean(self.grid_spec)
        if self.check_kind not in ("one-sided", "equality"):
            raise ValueError(f"unknown check_kind {self.check_kind!r}")
        if self.check_kind == "one-sided":
            consistent = self.passed == (self.worst_margin > self.tolerance)
        else:
            consistent = self.passed == (abs(self.worst_margin) <= self.tolerance)
        if not consistent:
            raise ValueError("passed flag inconsistent with margin and tolerance")

    @classmethod
    def one_sided(cls, lemma_id, worst_margin, worst_point=(), grid_spec="",
                  tolerance=0.0):
        return cls(lemma_id, worst_margin > tolerance, float(worst_margin),
                   tuple(float(c) for c in worst_point), grid_spec,
                   float(tolerance), "one-sided")

    @classmethod
    def equality(cls, lemma_id, worst_margin, worst_point=(), grid_spec="",
                 tolerance=0.0):
        return cls(lemma_id, abs(worst_margin) <= tolerance, float(worst_margin),
                   tuple(float(c) for c in worst_point), grid_spec,
                   float(tolerance), "equality")

    def csv_line(self):
        point = ";".join(format_float(c) for c in self.worst_point)
        return ",".join([self.lemma_id,
                         "true" if self.passed else "false",
                         format_float(self.worst_margin),
                         point,
                         self.grid_spec,
                         format_float(self.tolerance)])


CSV_HEADER = "lemma_id,passed,worst_margin,worst_point,grid,tolerance"


def reports_to_csv(reports):
    return "\n".join([CSV_HEADER] + [r.csv_line() for r in reports]) + "\n"
