"""Problem files: YAML documents with exact rational strings.

Example::

    algebra:
      blocks:
        - {dim: 4, weight: "1/4"}
    m_generators:
      - label: sigma_x (x) 1
        blocks: [[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]]
    n_generators:
      - term: "(gen 0)"
    target: {term: "(gen 1)"}
    precision_k: 4
    budget: 5000

Matrix entries are integers or strings such as ``"1/2"``, ``"-i"`` or
``"1/2+3/4*i"``; floats are rejected so that every input stays exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

import yaml

from ..exactnum import GR, parse_gaussian, rational
from ..engine import spectral_gap_fn_from_kazhdan
from ..findim import BlockMatrix, FindimPair, MultiMatrixAlgebra, certified_gap_function, findim_pair_oracle
from ..oracle import KazhdanData, SpectralGapFunction
from ..termalg import AdjointStructure, Gen, Term, TermSyntaxError, adjoint_close, parse_term

DEFAULT_BUDGET = 5000
BUDGET_ENV = "CONDEXP_BUDGET"


class ProblemError(ValueError):
    """Malformed problem file; ``where`` names the offending field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class MatrixSpec:
    label: str
    blocks: list


@dataclass
class Problem:
    blocks: list[tuple[int, Any]]
    m_generators: list[MatrixSpec]
    n_generators: list[Term | MatrixSpec]
    n_adjoint: list[str] | None
    target: Term | MatrixSpec
    precision_k: int | None = None
    budget: int | None = None
    spectral_gap: dict = field(default_factory=lambda: {"kind": "certified"})
    kazhdan: KazhdanData | None = None
    pp_basis: list[tuple[Term, Term]] = field(default_factory=list)
    source: str = "<problem>"

    # assembled lazily by :meth:`build`
    _built: Any = None

    def algebra(self, validate: bool = True) -> MultiMatrixAlgebra:
        return MultiMatrixAlgebra(self.blocks, validate=validate)

    def matrix(self, spec: MatrixSpec, algebra: MultiMatrixAlgebra, where: str) -> BlockMatrix:
        try:
            return algebra.element(spec.blocks)
        except (ValueError, TypeError) as exc:
            raise ProblemError(where, str(exc)) from None

    def m_matrices(self, algebra: MultiMatrixAlgebra) -> list[BlockMatrix]:
        return [self.matrix(g, algebra, f"m_generators[{i}]") for i, g in enumerate(self.m_generators)]

    def build(self) -> "Built":
        """Validate and assemble the pair; raises ``ValueError`` on precondition failures."""
        if self._built is not None:
            return self._built
        alg = self.algebra()
        gens = self.m_matrices(alg)
        n_items: list = []
        for i, g in enumerate(self.n_generators):
            n_items.append(self.matrix(g, alg, f"n_generators[{i}]") if isinstance(g, MatrixSpec) else g)
        target = self.target
        if isinstance(target, MatrixSpec):
            gens.append(self.matrix(target, alg, "target"))
            target = Gen(len(gens) - 1)
        adj = adjoint_close(self.n_adjoint) if self.n_adjoint is not None else None
        pair = findim_pair_oracle(alg, gens, n_items, adj)
        self._built = Built(pair, target)
        return self._built

    def resolved_budget(self, override: int | None = None) -> int:
        if override is not None:
            return override
        if self.budget is not None:
            return self.budget
        return env_budget()

    def resolved_precision(self, override: int | None = None) -> int:
        if override is not None:
            return override
        return self.precision_k if self.precision_k is not None else 4


@dataclass
class Built:
    pair: FindimPair
    target: Term


def env_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ProblemError(BUDGET_ENV, f"not an integer: {raw!r}") from None
    if value < 0:
        raise ProblemError(BUDGET_ENV, "must be non-negative")
    return value


def _entry(x, where: str) -> GR:
    if isinstance(x, bool) or isinstance(x, float):
        raise ProblemError(where, f"entries must be integers or exact strings, got {x!r}")
    if isinstance(x, int):
        return GR(x)
    if isinstance(x, str):
        try:
            return parse_gaussian(x)
        except ValueError as exc:
            raise ProblemError(where, str(exc)) from None
    raise ProblemError(where, f"unsupported entry {x!r}")


def _entries(rows, where: str):
    if not isinstance(rows, list):
        raise ProblemError(where, "expected a list")
    out = []
    for i, r in enumerate(rows):
        if isinstance(r, list):
            out.append([_entry(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)])
        else:
            out.append(_entry(r, f"{where}[{i}]"))
    return out


def _matrix(node, where: str, label: str = "") -> MatrixSpec:
    if isinstance(node, dict):
        label = str(node.get("label", label))
        if "blocks" not in node:
            raise ProblemError(where, "matrix needs a 'blocks' list")
        blocks = node["blocks"]
    else:
        blocks = node
    if not isinstance(blocks, list) or not blocks:
        raise ProblemError(where, "'blocks' must be a non-empty list (one entry per algebra block)")
    return MatrixSpec(label, [_entries(b, f"{where}.blocks[{i}]") for i, b in enumerate(blocks)])


def _term(text, where: str) -> Term:
    if not isinstance(text, str):
        raise ProblemError(where, "terms are written as s-expression strings")
    try:
        return parse_term(text)
    except (TermSyntaxError, ValueError) as exc:
        raise ProblemError(where, str(exc)) from None


def _term_or_matrix(node, where: str):
    if isinstance(node, dict) and "term" in node:
        return _term(node["term"], f"{where}.term")
    if isinstance(node, dict) and "matrix" in node:
        return _matrix({"blocks": node["matrix"], "label": node.get("label", "")}, where)
    if isinstance(node, str):
        return _term(node, where)
    raise ProblemError(where, "expected {term: ...} or {matrix: ...}")


def _natural(node, where: str) -> int:
    if isinstance(node, bool) or not isinstance(node, int) or node < 0:
        raise ProblemError(where, f"expected a natural number, got {node!r}")
    return node


def _weight(x, where: str):
    if isinstance(x, (bool, float)):
        raise ProblemError(where, f"weights must be exact (integer or 'p/q' string), got {x!r}")
    try:
        return rational(x)
    except (ValueError, TypeError) as exc:
        raise ProblemError(where, str(exc)) from None


def parse_problem(text: str, source: str = "<problem>") -> Problem:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ProblemError(where, f"YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(doc, dict):
        raise ProblemError(source, "the problem file must be a mapping")
    known = {
        "algebra", "m_generators", "n_generators", "n_adjoint", "target", "precision_k",
        "budget", "spectral_gap", "kazhdan", "pp_basis", "description",
    }
    for key in doc:
        if key not in known:
            raise ProblemError(str(key), "unknown field")
    for key in ("algebra", "m_generators", "n_generators", "target"):
        if key not in doc:
            raise ProblemError(key, "missing required field")

    alg = doc["algebra"]
    if not isinstance(alg, dict) or not isinstance(alg.get("blocks"), list) or not alg["blocks"]:
        raise ProblemError("algebra.blocks", "expected a non-empty list of {dim, weight}")
    blocks = []
    for i, b in enumerate(alg["blocks"]):
        where = f"algebra.blocks[{i}]"
        if not isinstance(b, dict) or "dim" not in b or "weight" not in b:
            raise ProblemError(where, "each block needs 'dim' and 'weight'")
        d = _natural(b["dim"], f"{where}.dim")
        if d == 0:
            raise ProblemError(f"{where}.dim", "block dimension must be positive")
        w = _weight(b["weight"], f"{where}.weight")
        if w <= 0:
            raise ProblemError(f"{where}.weight", "weights must be positive")
        blocks.append((d, w))

    if not isinstance(doc["m_generators"], list):
        raise ProblemError("m_generators", "expected a list")
    m_gens = [_matrix(g, f"m_generators[{i}]", f"m{i}") for i, g in enumerate(doc["m_generators"])]
    if not isinstance(doc["n_generators"], list) or not doc["n_generators"]:
        raise ProblemError("n_generators", "expected a non-empty list")
    n_gens = [_term_or_matrix(g, f"n_generators[{i}]") for i, g in enumerate(doc["n_generators"])]

    n_adjoint = doc.get("n_adjoint")
    if n_adjoint is not None:
        if not isinstance(n_adjoint, list) or len(n_adjoint) != len(n_gens):
            raise ProblemError("n_adjoint", "expected one declaration ('self' or 'pair') per N-generator")
        try:
            adjoint_close(n_adjoint)
        except ValueError as exc:
            raise ProblemError("n_adjoint", str(exc)) from None

    problem = Problem(
        blocks=blocks,
        m_generators=m_gens,
        n_generators=n_gens,
        n_adjoint=n_adjoint,
        target=_term_or_matrix(doc["target"], "target"),
        source=source,
    )
    if "precision_k" in doc:
        problem.precision_k = _natural(doc["precision_k"], "precision_k")
    if "budget" in doc:
        problem.budget = _natural(doc["budget"], "budget")
    if "spectral_gap" in doc:
        sg = doc["spectral_gap"]
        if not isinstance(sg, dict) or sg.get("kind") not in ("certified", "kazhdan", "linear"):
            raise ProblemError("spectral_gap.kind", "expected certified, kazhdan or linear")
        if sg["kind"] == "linear":
            _natural(sg.get("offset", 0), "spectral_gap.offset")
            _natural(sg.get("floor", 0), "spectral_gap.floor")
        problem.spectral_gap = dict(sg)
    if "kazhdan" in doc:
        kd = doc["kazhdan"]
        if not isinstance(kd, dict):
            raise ProblemError("kazhdan", "expected {set, m, p}")
        codes = kd.get("set", [])
        if not isinstance(codes, list):
            raise ProblemError("kazhdan.set", "expected a list of term codes")
        try:
            problem.kazhdan = KazhdanData(
                tuple(_natural(c, f"kazhdan.set[{i}]") for i, c in enumerate(codes)),
                _natural(kd.get("m"), "kazhdan.m"),
                _natural(kd.get("p", 0), "kazhdan.p"),
            )
        except ValueError as exc:
            if isinstance(exc, ProblemError):
                raise
            raise ProblemError("kazhdan", str(exc)) from None
    if "pp_basis" in doc:
        pp = doc["pp_basis"]
        if not isinstance(pp, list) or not pp:
            raise ProblemError("pp_basis", "expected a non-empty list of {point, expectation}")
        for i, item in enumerate(pp):
            where = f"pp_basis[{i}]"
            if not isinstance(item, dict) or "point" not in item or "expectation" not in item:
                raise ProblemError(where, "each basis element needs 'point' and 'expectation'")
            problem.pp_basis.append((_term(item["point"], f"{where}.point"), _term(item["expectation"], f"{where}.expectation")))
    return problem


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError(path, str(exc)) from None
    return parse_problem(text, path)


def spectral_gap_function(problem: Problem, built: Built) -> SpectralGapFunction:
    """The configured spectral gap function; ``certified`` is checked exactly on the instance."""
    kind = problem.spectral_gap.get("kind", "certified")
    if kind == "linear":
        return SpectralGapFunction.linear(
            int(problem.spectral_gap.get("offset", 0)), int(problem.spectral_gap.get("floor", 0))
        )
    if kind == "kazhdan":
        if problem.kazhdan is None:
            raise ValueError("spectral_gap kind 'kazhdan' needs a 'kazhdan' section")
        return spectral_gap_fn_from_kazhdan(problem.kazhdan, adjoint_structure(built))
    f = certified_gap_function(built.pair)
    if f is None:
        raise ValueError("no exact spectral gap certificate for these N-generators")
    return f


def adjoint_structure(built: Built) -> AdjointStructure:
    return built.pair.n_adjoint
