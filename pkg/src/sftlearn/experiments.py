"""Seeded Monte Carlo experiments over the identification machinery.

Each runner freezes one question into a reproducible protocol:

* ``ml-convergence`` — does maximum likelihood settle on the true grammar
  as the sample grows?
* ``entropy-convergence`` — same for the minimum-entropy learner, plus an
  entropy-monotonicity sweep over scaled copies of the potential.
* ``language-change`` — with a reward on a periodic orbit that only the
  larger grammar allows, the minimum-entropy learner flips to the larger
  grammar once the reward crosses a threshold found by bisection.
* ``ml-misidentification`` — a penalty on the true grammar's extra
  transitions makes finite samples look like they came from the smaller
  grammar.
* ``monotonicity`` — exhaustive strict-pressure-monotonicity scan over all
  comparable primitive pairs of a lexicon under random potentials.
* ``smb`` — convergence of the per-symbol cylinder score to the entropy
  rate along sampled words.

Run ``i`` of an experiment uses seed ``base_seed + i``, and a report is a
pure function of its config, so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .gibbs import (
    Potential,
    cylinder_log_measure,
    gibbs_chain,
    periodic_orbit_potential,
    pressure,
    sample,
)
from .identify import DEFAULT_TIE_TOL, identify, identify_curve
from .serialize import (
    _encode_float,
    encode_floats,
    grammar_from_dict,
    grammar_to_dict,
    potential_from_dict,
    potential_to_dict,
)
from .symbolic import (
    Grammar,
    Lexicon,
    OrderRelation,
    ValidationError,
    compare,
    enumerate_grammars,
    format_word,
)

EXPERIMENT_IDS = (
    "ml-convergence",
    "entropy-convergence",
    "language-change",
    "ml-misidentification",
    "monotonicity",
    "smb",
)

DEFAULT_CHECKPOINTS = (10, 50, 200, 2000)

_GOLDEN_ROWS = ((1, 1), (1, 0))
_FULL_ROWS = ((1, 1), (1, 1))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a runner needs; unused fields are simply ignored.

    ``candidates=None`` means "enumerate every primitive grammar over the
    relevant lexicon".  Seeds for run ``i`` are ``base_seed + i``.
    """

    experiment: str
    theta: int | None = None
    true_grammar: Grammar | None = None
    lower: Grammar | None = None
    upper: Grammar | None = None
    potential: Potential | None = None
    candidates: tuple[Grammar, ...] | None = None
    checkpoints: tuple[int, ...] = DEFAULT_CHECKPOINTS
    seeds: int = 200
    base_seed: int = 0
    tie_tol: float = DEFAULT_TIE_TOL
    # entropy-convergence: scale factors for the monotonicity sweep
    scales: tuple[float, ...] = ()
    # language-change
    reward: float | str = "auto"
    reward_margin: float = 2.0
    bisect_tol: float = 1e-6
    # ml-misidentification
    penalties: tuple[float, ...] = (10.0,)
    sample_length: int = 50
    # monotonicity scan
    n_potentials: int = 20
    value_bound: float = 2.0
    potential_ranges: tuple[int, ...] = (2, 3)
    # smb
    tolerance: float = 0.05

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "theta": self.theta,
            "true_grammar": _opt(grammar_to_dict, self.true_grammar),
            "lower": _opt(grammar_to_dict, self.lower),
            "upper": _opt(grammar_to_dict, self.upper),
            "potential": _opt(potential_to_dict, self.potential),
            "candidates": ("auto" if self.candidates is None
                           else [grammar_to_dict(g) for g in self.candidates]),
            "checkpoints": list(self.checkpoints),
            "seeds": self.seeds,
            "base_seed": self.base_seed,
            "tie_tol": self.tie_tol,
            "scales": list(self.scales),
            "reward": self.reward,
            "reward_margin": self.reward_margin,
            "bisect_tol": self.bisect_tol,
            "penalties": list(self.penalties),
            "sample_length": self.sample_length,
            "n_potentials": self.n_potentials,
            "value_bound": self.value_bound,
            "potential_ranges": list(self.potential_ranges),
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_dict(cls, data) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ValidationError("experiment config must be a JSON object")
        if "experiment" not in data:
            raise ValidationError("experiment config is missing the 'experiment' field")
        known = {
            "experiment", "theta", "true_grammar", "lower", "upper", "potential",
            "candidates", "checkpoints", "seeds", "base_seed", "tie_tol", "scales",
            "reward", "reward_margin", "bisect_tol", "penalties", "sample_length",
            "n_potentials", "value_bound", "potential_ranges", "tolerance",
        }
        for key in data:
            if key not in known:
                raise ValidationError(f"unknown experiment config field: {key!r}")
        kwargs: dict = {"experiment": str(data["experiment"])}
        if data.get("theta") is not None:
            kwargs["theta"] = int(data["theta"])
        for key in ("true_grammar", "lower", "upper"):
            if data.get(key) is not None:
                kwargs[key] = grammar_from_dict(data[key])
        if data.get("potential") is not None:
            kwargs["potential"] = potential_from_dict(data["potential"])
        cand = data.get("candidates", "auto")
        if cand not in (None, "auto"):
            kwargs["candidates"] = tuple(grammar_from_dict(g) for g in cand)
        for key, conv in (
            ("checkpoints", lambda v: tuple(int(x) for x in v)),
            ("seeds", int),
            ("base_seed", int),
            ("tie_tol", float),
            ("scales", lambda v: tuple(float(x) for x in v)),
            ("reward", lambda v: v if v == "auto" else float(v)),
            ("reward_margin", float),
            ("bisect_tol", float),
            ("penalties", lambda v: tuple(float(x) for x in v)),
            ("sample_length", int),
            ("n_potentials", int),
            ("value_bound", float),
            ("potential_ranges", lambda v: tuple(int(x) for x in v)),
            ("tolerance", float),
        ):
            if key in data:
                kwargs[key] = conv(data[key])
        return cls(**kwargs)


def _opt(fn, value):
    return None if value is None else fn(value)


@dataclass
class ExperimentReport:
    """Curve, thresholds, per-candidate table, and run details.

    ``wall_time_s`` is kept on the object for interactive use but excluded
    from serialization so that identical configs render identical bytes.
    """

    experiment: str
    config: dict
    curve: list[dict]
    thresholds: dict = field(default_factory=dict)
    candidate_table: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return encode_floats({
            "experiment": self.experiment,
            "config": self.config,
            "curve": self.curve,
            "thresholds": self.thresholds,
            "candidate_table": self.candidate_table,
            "details": self.details,
        })

    def csv_rows(self) -> list[tuple]:
        return [(row["n"], row["frequency"], row.get("mean_score_gap"))
                for row in self.curve]


def default_config(experiment: str) -> ExperimentConfig:
    """The small two-symbol setups every experiment is calibrated on."""
    lex = Lexicon(2)
    golden = Grammar(lex, _GOLDEN_ROWS)
    full = Grammar(lex, _FULL_ROWS)
    if experiment in ("ml-convergence", "entropy-convergence"):
        return ExperimentConfig(experiment=experiment, true_grammar=golden)
    if experiment == "language-change":
        return ExperimentConfig(experiment=experiment, lower=golden, upper=full)
    if experiment == "ml-misidentification":
        return ExperimentConfig(experiment=experiment, lower=golden, upper=full,
                                penalties=(10.0,), sample_length=50, seeds=500)
    if experiment == "monotonicity":
        return ExperimentConfig(experiment=experiment, theta=2)
    if experiment == "smb":
        return ExperimentConfig(experiment=experiment, true_grammar=golden,
                                checkpoints=(100, 1000, 10000), seeds=50)
    raise ValidationError(f"unknown experiment id: {experiment!r}")


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------

def _resolve_candidates(cfg: ExperimentConfig, lexicon: Lexicon) -> tuple[Grammar, ...]:
    if cfg.candidates is not None:
        for g in cfg.candidates:
            if g.lexicon != lexicon:
                raise ValidationError("candidate lexicon mismatch")
        return tuple(cfg.candidates)
    return tuple(enumerate_grammars(lexicon))


def _index_of(grammar: Grammar, candidates, role: str) -> int:
    for i, g in enumerate(candidates):
        if g == grammar:
            return i
    raise ValidationError(f"{role} grammar is not among the candidates")


def _comparable_pairs(grammars) -> list[tuple[int, int]]:
    """Index pairs (i, j) with grammar i strictly below grammar j."""
    stack = np.stack([g.array for g in grammars])
    le = (stack[:, None] <= stack[None, :]).all(axis=(2, 3))
    eq = (stack[:, None] == stack[None, :]).all(axis=(2, 3))
    return [(int(i), int(j)) for i, j in np.argwhere(le & ~eq)]


def _random_potentials(lexicon: Lexicon, count: int, ranges, bound: float,
                       base_seed: int) -> list[Potential]:
    """Full random tables, values uniform in [-bound, bound], ranges cycled."""
    import itertools

    rng = np.random.default_rng(base_seed)
    out = []
    for k in range(count):
        r = ranges[k % len(ranges)]
        words = list(itertools.product(lexicon.symbols, repeat=r))
        values = rng.uniform(-bound, bound, size=len(words))
        out.append(Potential.from_table(lexicon, r, dict(zip(words, map(float, values)))))
    return out


def _mean(values) -> float | None:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return sum(vals) / len(vals)


def _ml_gap(outcome) -> float | None:
    lls = sorted((s.log_likelihood for s in outcome.scores), reverse=True)
    if len(lls) < 2 or lls[0] == -math.inf:
        return None
    return lls[0] - lls[1]


def _entropy_gap(outcome) -> float | None:
    ents = sorted(s.entropy for s in outcome.scores if s.admissible)
    if len(ents) < 2:
        return None
    return ents[1] - ents[0]


def _candidate_table(candidates, chains, final_outcomes) -> list[dict]:
    rows = []
    for j, (g, chain) in enumerate(zip(candidates, chains)):
        lls = [oc.scores[j].log_likelihood for oc in final_outcomes]
        admit = [oc.scores[j].admissible for oc in final_outcomes]
        rows.append({
            "grammar": grammar_to_dict(g),
            "entropy": chain.entropy,
            "admit_frequency": _mean(admit),
            "mean_log_likelihood": _encode_float(_mean(lls)),
        })
    return rows


def _first_seed_record(cfg, truth_chain, final_outcome) -> dict:
    from .serialize import outcome_to_dict

    n = max(max(cfg.checkpoints), truth_chain.potential.range - 1)
    word = sample(truth_chain, n, cfg.base_seed).word
    return {
        "seed": cfg.base_seed,
        "word": format_word(word),
        "final_outcome": outcome_to_dict(final_outcome),
    }


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

def _run_convergence(cfg: ExperimentConfig, procedure: str) -> ExperimentReport:
    if cfg.true_grammar is None:
        raise ValidationError(f"{cfg.experiment} needs a true_grammar")
    lex = cfg.true_grammar.lexicon
    phi = cfg.potential if cfg.potential is not None else Potential.zero(lex)
    candidates = _resolve_candidates(cfg, lex)
    truth_idx = _index_of(cfg.true_grammar, candidates, "true")
    truth_chain = gibbs_chain(cfg.true_grammar, phi)
    chains = tuple(gibbs_chain(g, phi) for g in candidates)
    cps = cfg.checkpoints
    success = [[] for _ in cps]
    gaps = [[] for _ in cps]
    finals = []
    for i in range(cfg.seeds):
        outcomes = identify_curve(truth_chain, phi, candidates, cps,
                                  cfg.base_seed + i, cfg.tie_tol,
                                  candidate_chains=chains)
        for k, oc in enumerate(outcomes):
            if procedure == "ml":
                success[k].append(oc.ml_indices == (truth_idx,))
                gaps[k].append(_ml_gap(oc))
            else:
                success[k].append(oc.min_entropy_indices == (truth_idx,))
                gaps[k].append(_entropy_gap(oc))
        finals.append(outcomes[-1])
    curve = [{"n": cp, "frequency": _mean(success[k]), "mean_score_gap": _mean(gaps[k])}
             for k, cp in enumerate(cps)]
    details = {"first_seed": _first_seed_record(cfg, truth_chain, finals[0]),
               "true_index": truth_idx}
    if procedure == "entropy" and cfg.scales:
        details["monotonicity"] = _entropy_monotonicity_sweep(candidates, phi, cfg.scales)
    return ExperimentReport(
        experiment=cfg.experiment,
        config=cfg.to_dict(),
        curve=curve,
        candidate_table=_candidate_table(candidates, chains, finals),
        details=details,
    )


def _entropy_monotonicity_sweep(candidates, phi: Potential, scales) -> dict:
    pairs = _comparable_pairs(candidates)
    rows = []
    first_fail = None
    for s in sorted(scales):
        ents = [gibbs_chain(g, phi.scaled(s)).entropy for g in candidates]
        deltas = [ents[j] - ents[i] for i, j in pairs]
        violations = sum(1 for d in deltas if d <= 0)
        rows.append({"scale": s, "violations": violations,
                     "min_entropy_gap": min(deltas) if deltas else None})
        if violations and first_fail is None:
            first_fail = s
    return {"pairs": len(pairs), "scales": rows, "first_failing_scale": first_fail}


def run_ml_convergence(config: ExperimentConfig) -> ExperimentReport:
    """Frequency of exact maximum-likelihood recovery along sample prefixes."""
    t0 = time.perf_counter()
    report = _run_convergence(config, "ml")
    report.wall_time_s = time.perf_counter() - t0
    return report


def run_entropy_convergence(config: ExperimentConfig) -> ExperimentReport:
    """Frequency of exact minimum-entropy recovery, plus a monotonicity sweep."""
    t0 = time.perf_counter()
    report = _run_convergence(config, "entropy")
    report.wall_time_s = time.perf_counter() - t0
    return report


def entropy_crossing(lower: Grammar, upper: Grammar, tol: float = 1e-6) -> float:
    """Smallest orbit reward at which the rewarded chain on ``upper`` drops
    below the entropy of ``lower``'s chain, located by bisection.

    The reward potential vanishes on words admissible under ``lower``, so
    the comparison baseline is ``lower``'s topological entropy throughout.
    """
    if compare(lower, upper) is not OrderRelation.LESS:
        raise ValidationError("entropy_crossing needs lower strictly below upper")

    def gap(reward: float) -> float:
        phi = periodic_orbit_potential(lower, upper, reward)
        return gibbs_chain(upper, phi).entropy - gibbs_chain(lower, phi).entropy

    lo, hi = 0.0, 1.0
    if gap(lo) <= 0:
        raise RuntimeError("entropy of the larger grammar does not exceed the smaller at reward 0")
    while gap(hi) >= 0:
        hi *= 2.0
        if hi > 256.0:
            raise RuntimeError("no entropy crossing found below reward 256")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def run_language_change(config: ExperimentConfig) -> ExperimentReport:
    """Reward a periodic orbit outside the smaller language and watch the
    minimum-entropy learner switch to the larger grammar while maximum
    likelihood stays with the true (smaller) one."""
    t0 = time.perf_counter()
    cfg = config
    if cfg.lower is None or cfg.upper is None:
        raise ValidationError("language-change needs lower and upper grammars")
    lex = cfg.lower.lexicon
    crossing = entropy_crossing(cfg.lower, cfg.upper, cfg.bisect_tol)
    reward = crossing + cfg.reward_margin if cfg.reward == "auto" else float(cfg.reward)
    phi = periodic_orbit_potential(cfg.lower, cfg.upper, reward)
    candidates = _resolve_candidates(cfg, lex)
    lower_idx = _index_of(cfg.lower, candidates, "lower")
    upper_idx = _index_of(cfg.upper, candidates, "upper")
    truth_chain = gibbs_chain(cfg.lower, phi)
    chains = tuple(gibbs_chain(g, phi) for g in candidates)
    cps = cfg.checkpoints
    flip = [[] for _ in cps]
    ml_true = [[] for _ in cps]
    gaps = [[] for _ in cps]
    finals = []
    for i in range(cfg.seeds):
        outcomes = identify_curve(truth_chain, phi, candidates, cps,
                                  cfg.base_seed + i, cfg.tie_tol,
                                  candidate_chains=chains)
        for k, oc in enumerate(outcomes):
            flip[k].append(upper_idx in oc.min_entropy_indices
                           and lower_idx not in oc.min_entropy_indices)
            ml_true[k].append(oc.ml_indices == (lower_idx,))
            gaps[k].append(_entropy_gap(oc))
        finals.append(outcomes[-1])
    curve = [{"n": cp, "frequency": _mean(flip[k]), "mean_score_gap": _mean(gaps[k]),
              "ml_frequency": _mean(ml_true[k])} for k, cp in enumerate(cps)]
    report = ExperimentReport(
        experiment=cfg.experiment,
        config=cfg.to_dict(),
        curve=curve,
        thresholds={"entropy_crossing": crossing, "reward": reward,
                    "bisect_tol": cfg.bisect_tol},
        candidate_table=_candidate_table(candidates, chains, finals),
        details={"first_seed": _first_seed_record(cfg, truth_chain, finals[0]),
                 "lower_index": lower_idx, "upper_index": upper_idx,
                 "orbit_potential": potential_to_dict(phi)},
        wall_time_s=time.perf_counter() - t0,
    )
    return report


def run_ml_misidentification(config: ExperimentConfig) -> ExperimentReport:
    """Penalize the true grammar's extra transitions and measure how often a
    short sample is maximum-likelihood-attributed to the smaller grammar."""
    t0 = time.perf_counter()
    cfg = config
    if cfg.lower is None or cfg.upper is None:
        raise ValidationError("ml-misidentification needs lower and upper grammars")
    if compare(cfg.lower, cfg.upper) is not OrderRelation.LESS:
        raise ValidationError("ml-misidentification needs lower strictly below upper")
    lex = cfg.lower.lexicon
    candidates = _resolve_candidates(cfg, lex)
    lower_idx = _index_of(cfg.lower, candidates, "lower")
    upper_idx = _index_of(cfg.upper, candidates, "upper")
    extra = [(a, b) for a in lex.symbols for b in lex.symbols
             if cfg.upper.matrix[a][b] and not cfg.lower.matrix[a][b]]
    curve = []
    first = None
    for penalty in cfg.penalties:
        phi = Potential.from_table(lex, 2, {pair: -float(penalty) for pair in extra})
        truth_chain = gibbs_chain(cfg.upper, phi)
        chains = tuple(gibbs_chain(g, phi) for g in candidates)
        hits = []
        avoided = []
        gaps = []
        for i in range(cfg.seeds):
            word = sample(truth_chain, cfg.sample_length, cfg.base_seed + i).word
            oc = identify(word, phi, candidates, cfg.tie_tol, chains=chains)
            ok_avoid = oc.scores[lower_idx].admissible
            avoided.append(ok_avoid)
            hits.append(ok_avoid and lower_idx in oc.ml_indices
                        and upper_idx not in oc.ml_indices)
            if ok_avoid:
                gaps.append(oc.scores[lower_idx].log_likelihood
                            - oc.scores[upper_idx].log_likelihood)
            if first is None:
                first = {"seed": cfg.base_seed, "penalty": penalty,
                         "word": format_word(word)}
        curve.append({"n": cfg.sample_length, "penalty": penalty,
                      "frequency": _mean(hits), "mean_score_gap": _mean(gaps),
                      "avoid_frequency": _mean(avoided)})
    return ExperimentReport(
        experiment=cfg.experiment,
        config=cfg.to_dict(),
        curve=curve,
        thresholds={"penalized_transitions": [list(p) for p in extra]},
        details={"first_seed": first, "lower_index": lower_idx,
                 "upper_index": upper_idx},
        wall_time_s=time.perf_counter() - t0,
    )


def run_monotonicity_scan(config: ExperimentConfig) -> ExperimentReport:
    """Strict pressure monotonicity over every comparable primitive pair of a
    lexicon, swept across the zero potential and random finite-range tables."""
    t0 = time.perf_counter()
    cfg = config
    if cfg.theta is None:
        raise ValidationError("monotonicity scan needs a theta")
    lex = Lexicon(cfg.theta)
    grammars = enumerate_grammars(lex)
    pairs = _comparable_pairs(grammars)
    potentials = [Potential.zero(lex)] + _random_potentials(
        lex, cfg.n_potentials, cfg.potential_ranges, cfg.value_bound, cfg.base_seed)
    curve = []
    total_violations = 0
    min_gap = math.inf
    min_lambda_gap = math.inf
    for k, phi in enumerate(potentials):
        values = [pressure(g, phi) for g in grammars]
        deltas = [values[j] - values[i] for i, j in pairs]
        violations = sum(1 for d in deltas if d <= 0)
        total_violations += violations
        gap = min(deltas) if deltas else math.inf
        min_gap = min(min_gap, gap)
        if k == 0:
            lams = [math.exp(v) for v in values]
            min_lambda_gap = min((lams[j] - lams[i] for i, j in pairs), default=math.inf)
        curve.append({"n": k, "range": phi.range,
                      "frequency": violations / len(pairs) if pairs else 0.0,
                      "mean_score_gap": gap})
    return ExperimentReport(
        experiment=cfg.experiment,
        config=cfg.to_dict(),
        curve=curve,
        thresholds={"min_pressure_gap": min_gap,
                    "min_lambda_gap_zero_potential": min_lambda_gap,
                    "comparable_pairs": len(pairs),
                    "grammars": len(grammars),
                    "violations": total_violations},
        wall_time_s=time.perf_counter() - t0,
    )


def run_smb(config: ExperimentConfig) -> ExperimentReport:
    """Fraction of sampled words whose per-symbol cylinder score sits within
    a tolerance of the chain's entropy rate, along growing prefixes."""
    t0 = time.perf_counter()
    cfg = config
    if cfg.true_grammar is None:
        raise ValidationError("smb needs a true_grammar")
    lex = cfg.true_grammar.lexicon
    phi = cfg.potential if cfg.potential is not None else Potential.zero(lex)
    chain = gibbs_chain(cfg.true_grammar, phi)
    cps = cfg.checkpoints
    within = [[] for _ in cps]
    devs = [[] for _ in cps]
    final_estimates = []
    for i in range(cfg.seeds):
        word = sample(chain, max(cps[-1], phi.range - 1), cfg.base_seed + i).word
        for k, cp in enumerate(cps):
            est = -cylinder_log_measure(chain, word[:cp]) / cp
            dev = abs(est - chain.entropy)
            within[k].append(dev <= cfg.tolerance)
            devs[k].append(dev)
            if k == len(cps) - 1:
                final_estimates.append(est)
    curve = [{"n": cp, "frequency": _mean(within[k]), "mean_score_gap": _mean(devs[k])}
             for k, cp in enumerate(cps)]
    return ExperimentReport(
        experiment=cfg.experiment,
        config=cfg.to_dict(),
        curve=curve,
        thresholds={"tolerance": cfg.tolerance, "entropy": chain.entropy},
        details={"final_estimates": final_estimates},
        wall_time_s=time.perf_counter() - t0,
    )


_RUNNERS = {
    "ml-convergence": run_ml_convergence,
    "entropy-convergence": run_entropy_convergence,
    "language-change": run_language_change,
    "ml-misidentification": run_ml_misidentification,
    "monotonicity": run_monotonicity_scan,
    "smb": run_smb,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Dispatch a config to its runner by experiment id."""
    if config.experiment not in _RUNNERS:
        raise ValidationError(
            f"unknown experiment id {config.experiment!r}; expected one of {EXPERIMENT_IDS}")
    if config.seeds < 1:
        raise ValidationError("seeds must be a positive count of runs")
    return _RUNNERS[config.experiment](config)
