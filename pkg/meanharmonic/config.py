from __future__ import annotations

from fractions import Fraction
import math
import logging

from .errors import InvalidInput
from .meanvalue import DEFAULT_SAMPLES, ORACLES, Box, default_box
from .norms import NormSpec
from .polycore import Polynomial, as_rational

log = logging.getLogger(__name__)

COMMANDS = ("moments", "basis", "verify", "pizzetti", "scan", "fp", "bose")


def default_p_grid() -> list[float]:
    """
    1, 1.1, …, 10 followed by 20, 50, 100
    """
    return [round(1 + k / 10, 1) for k in range(91)] + [20.0, 50.0, 100.0]


def parse_degrees(text: str) -> list[int]:
    """
    ``4..8`` (inclusive) or a comma separated list
    """
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(d) for d in text.split(",")]
    except ValueError:
        raise InvalidInput("invalid degree range {!r} (not in format '4..8' or '4,5,6')".format(text))


def parse_grid(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise InvalidInput("invalid p grid {!r}".format(text))


def parse_probe(text: str, n: int) -> tuple[tuple[Fraction, ...], Fraction]:
    """
    ``x1,…,xn:r`` with decimal or ``num/den`` entries
    """
    try:
        center, radius = text.rsplit(":", 1)
        x = tuple(as_rational(c.strip()) for c in center.split(","))
        r = as_rational(radius.strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidInput("invalid probe {!r} (not in format 'x1,...,xn:r')".format(text))
    if len(x) != n:
        raise InvalidInput("probe {!r} has {} coordinates, expected {}".format(text, len(x), n))
    if r <= 0:
        raise InvalidInput("probe {!r} has a non-positive radius".format(text))
    return x, r


def parse_box(text: str, n: int) -> Box:
    """
    ``lo,hi`` for the cube (lo, hi)ⁿ
    """
    try:
        lo, hi = (as_rational(v.strip()) for v in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InvalidInput("invalid domain box {!r} (not in format 'lo,hi')".format(text))
    if not lo < hi:
        raise InvalidInput("empty domain box {!r}".format(text))
    return ((lo, hi),) * n


class RunConfig:
    """
    Everything a command line run depends on. It is echoed into the JSON output so a run can be repeated.
    :meth:`validate` turns the text fields into domain objects and rejects invalid combinations before any
    computation starts.

    :param command: one of moments, basis, verify, pizzetti, scan, fp, bose
    :param norm: ``lp:<p>``, ``lp:<p>@a1,…,an`` or ``polytope:<file.json>``
    :param n: dimension (taken from the polytope file if omitted)
    :param weight: the weight polynomial
    :param candidate: polynomial to verify or to average
    :param probes: explicit probes ``x1,…,xn:r``
    :param probe_count: number of random admissible probes drawn with the seed
    :param seed: seed of every random choice (probes, Monte-Carlo)
    :param tolerance: added to the error bound of the oracle
    """

    def __init__(
        self,
        command: str,
        norm: str | None = None,
        n: int | None = None,
        weight: str = "1",
        degree: int | None = None,
        j_list: list[int] | None = None,
        max_order: int | None = None,
        candidate: str | None = None,
        probes: list[str] | None = None,
        probe_count: int | None = None,
        oracle: str = "pizzetti",
        box: str | None = None,
        degrees: str | None = None,
        grid: str | None = None,
        l: int | None = None,
        seed: int = 0,
        samples: int = DEFAULT_SAMPLES,
        tolerance: float = 0.0,
        output: str | None = None,
        output_format: str | None = None,
        cache_dir: str | None = None,
    ):
        assert isinstance(command, str)
        assert isinstance(norm, (str | None))
        assert isinstance(n, (int | None))
        assert isinstance(weight, str)
        assert isinstance(degree, (int | None))
        assert isinstance(j_list, (list | None))
        assert isinstance(max_order, (int | None))
        assert isinstance(candidate, (str | None))
        assert isinstance(probes, (list | None))
        assert isinstance(probe_count, (int | None))
        assert isinstance(oracle, str)
        assert isinstance(box, (str | None))
        assert isinstance(degrees, (str | None))
        assert isinstance(grid, (str | None))
        assert isinstance(l, (int | None))
        assert isinstance(seed, int)
        assert isinstance(samples, int)
        assert isinstance(tolerance, (float | int))
        assert isinstance(output, (str | None))
        assert isinstance(output_format, (str | None))
        assert isinstance(cache_dir, (str | None))

        self.command = command
        self.norm = norm
        self.n = n
        self.weight = weight
        self.degree = degree
        self.j_list = j_list
        self.max_order = max_order
        self.candidate = candidate
        self.probes = probes
        self.probe_count = probe_count
        self.oracle = oracle
        self.box = box
        self.degrees = degrees
        self.grid = grid
        self.l = l
        self.seed = seed
        self.samples = samples
        self.tolerance = float(tolerance)
        self.output = output
        self.output_format = output_format
        self.cache_dir = cache_dir

        self.norm_spec: NormSpec | None = None
        self.weight_polynomial: Polynomial | None = None
        self.candidate_polynomial: Polynomial | None = None
        self.probe_list: list[tuple[tuple[Fraction, ...], Fraction]] = []
        self.domain_box: Box | None = None
        self.degree_list: list[int] = []
        self.p_grid: list[float] = []

    def _require(self, *names: str):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise InvalidInput("{} needs {}".format(self.command, ", ".join("--" + m.replace("_", "-") for m in missing)))

    def validate(self) -> RunConfig:
        """
        Parse and check the configuration for its command.

        :raises InvalidInput: naming the first offending field
        """
        if self.command not in COMMANDS:
            raise InvalidInput("unknown command {!r}".format(self.command))
        if self.samples <= 0:
            raise InvalidInput("sample count must be positive, got {}".format(self.samples))
        if self.tolerance < 0:
            raise InvalidInput("tolerance must be non-negative, got {}".format(self.tolerance))
        if self.oracle not in ORACLES:
            raise InvalidInput("unknown oracle {!r}, expected one of {}".format(self.oracle, ", ".join(ORACLES)))
        if self.output_format is None:
            self.output_format = "csv" if self.command in ("scan", "fp") else "json"
        if self.output_format not in ("json", "csv") or (self.output_format == "csv" and self.command not in ("scan", "fp")):
            raise InvalidInput("{} cannot write {!r} output".format(self.command, self.output_format))

        if self.command == "fp":
            self.p_grid = default_p_grid() if self.grid is None else parse_grid(self.grid)
            if any(not math.isfinite(p) for p in self.p_grid):
                raise InvalidInput("p grid must hold finite values, got {}".format(self.grid))
            if any(p < 1 for p in self.p_grid):
                raise InvalidInput("p must be at least 1")
            return self

        if self.command != "bose":
            self._require("norm")
            self.norm_spec = NormSpec.parse(self.norm, self.n)
            self.n = self.norm_spec.n
        elif self.n is None:
            self.n = 2
        if self.n < 1:
            raise InvalidInput("dimension must be positive, got {}".format(self.n))
        self.weight_polynomial = Polynomial.parse(self.weight, self.n)

        if self.command == "moments":
            self._require("max_order")
            if self.max_order < 0:
                raise InvalidInput("max order must be non-negative, got {}".format(self.max_order))
        elif self.command in ("basis", "bose"):
            self._require("degree")
            if self.degree < 0:
                raise InvalidInput("degree must be non-negative, got {}".format(self.degree))
            if self.j_list is not None and (not self.j_list or any(j < 1 for j in self.j_list)):
                raise InvalidInput("j list must hold positive integers, got {}".format(self.j_list))
            if self.command == "bose" and self.l is not None and self.l < 0:
                raise InvalidInput("l must be non-negative, got {}".format(self.l))
        elif self.command == "scan":
            self._require("degrees")
            self.degree_list = parse_degrees(self.degrees)
            if not self.degree_list or any(b <= a for a, b in zip(self.degree_list, self.degree_list[1:])) or self.degree_list[0] < 0:
                raise InvalidInput("degrees must be an increasing sequence of non-negative integers, got {}".format(self.degrees))
        elif self.command in ("verify", "pizzetti"):
            self._require("candidate")
            self.candidate_polynomial = Polynomial.parse(self.candidate, self.n)
            self.domain_box = default_box(self.n) if self.box is None else parse_box(self.box, self.n)
            self.probe_list = [parse_probe(p, self.n) for p in self.probes or []]
            if self.probe_count is not None and self.probe_count < 0:
                raise InvalidInput("probe count must be non-negative, got {}".format(self.probe_count))
            if not self.probe_list and not self.probe_count:
                raise InvalidInput("{} needs --probe or --probes".format(self.command))
        return self

    def to_dict(self) -> dict:
        """
        :return: the text fields, as given on the command line
        """
        return {
            "command": self.command,
            "norm": self.norm,
            "n": self.n,
            "weight": self.weight,
            "degree": self.degree,
            "j_list": self.j_list,
            "max_order": self.max_order,
            "candidate": self.candidate,
            "probes": self.probes,
            "probe_count": self.probe_count,
            "oracle": self.oracle,
            "box": self.box,
            "degrees": self.degrees,
            "grid": self.grid,
            "l": self.l,
            "seed": self.seed,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "output": self.output,
            "output_format": self.output_format,
            "cache_dir": self.cache_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        """
        :param data: dict generated in `to_dict()`
        """
        return cls(**data)

    def __repr__(self):
        return "RunConfig({})".format(", ".join("{}={!r}".format(k, v) for k, v in self.to_dict().items() if v is not None))
