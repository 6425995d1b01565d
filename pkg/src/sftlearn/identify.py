"""Grammar identification from a single sampled word.

Two procedures over a finite candidate class: maximum likelihood picks the
grammars whose chain gives the observed cylinder the largest log measure,
and minimum entropy picks, among candidates that admit the word at all, the
ones whose chain has the smallest entropy rate.  Both tolerate ties up to a
configurable margin and are exposed through a single outcome object that
carries every candidate's score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gibbs import GibbsChain, Potential, cylinder_log_measure, gibbs_chain, sample
from .symbolic import Grammar, ValidationError, validate_word

DEFAULT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class CandidateScore:
    """One candidate's log likelihood and (if it admits the word) entropy."""

    grammar: Grammar
    log_likelihood: float
    entropy: float | None
    admissible: bool


@dataclass(frozen=True, eq=False)
class IdentificationOutcome:
    """Scores plus the maximum-likelihood and minimum-entropy answer sets.

    ``ml_indices`` and ``min_entropy_indices`` point into ``scores`` (which
    follows candidate order); the set properties resolve them to grammars.
    ``none_admissible`` flags the degenerate case where no candidate admits
    the word, leaving both answer sets empty.
    """

    n: int
    scores: tuple[CandidateScore, ...]
    ml_indices: tuple[int, ...]
    min_entropy_indices: tuple[int, ...]
    none_admissible: bool
    tie_tolerance: float

    @property
    def ml_set(self) -> frozenset[Grammar]:
        return frozenset(self.scores[i].grammar for i in self.ml_indices)

    @property
    def min_entropy_set(self) -> frozenset[Grammar]:
        return frozenset(self.scores[i].grammar for i in self.min_entropy_indices)


def score_candidates(word, potential: Potential, candidates,
                     chains=None) -> tuple[CandidateScore, ...]:
    """Log likelihood and entropy of ``word`` under each candidate's chain.

    ``chains`` may carry prebuilt :class:`GibbsChain` objects aligned with
    ``candidates`` (they are rebuilt from the potential otherwise); sweeps
    that score many words against a fixed class should pass them in.
    """
    candidates = tuple(candidates)
    if not candidates:
        raise ValidationError("candidate class is empty")
    for g in candidates:
        if g.lexicon != potential.lexicon:
            raise ValidationError("candidate lexicon does not match the potential")
    if chains is None:
        chains = tuple(gibbs_chain(g, potential) for g in candidates)
    else:
        chains = tuple(chains)
        if len(chains) != len(candidates):
            raise ValidationError("chains and candidates differ in length")
    w = validate_word(word, potential.lexicon)
    out = []
    for g, chain in zip(candidates, chains):
        ll = cylinder_log_measure(chain, w)
        admissible = ll > -math.inf
        out.append(CandidateScore(g, ll, chain.entropy if admissible else None, admissible))
    return tuple(out)


def _outcome(n: int, scores, tie_tol: float) -> IdentificationOutcome:
    best_ll = max(s.log_likelihood for s in scores)
    if best_ll == -math.inf:
        return IdentificationOutcome(n, tuple(scores), (), (), True, tie_tol)
    ml = tuple(i for i, s in enumerate(scores) if s.log_likelihood >= best_ll - tie_tol)
    ents = [(s.entropy, i) for i, s in enumerate(scores) if s.admissible]
    best_h = min(e for e, _ in ents)
    me = tuple(i for e, i in ents if e <= best_h + tie_tol)
    return IdentificationOutcome(n, tuple(scores), ml, me, False, tie_tol)


def identify(word, potential: Potential, candidates, tie_tol: float = DEFAULT_TIE_TOL,
             chains=None) -> IdentificationOutcome:
    """Score every candidate and form both answer sets."""
    if tie_tol < 0:
        raise ValidationError("tie tolerance must be nonnegative")
    scores = score_candidates(word, potential, candidates, chains=chains)
    return _outcome(len(tuple(word)), scores, tie_tol)


def ml_set(word, potential: Potential, candidates,
           tie_tol: float = DEFAULT_TIE_TOL) -> IdentificationOutcome:
    """Maximum-likelihood identification; the answer is ``outcome.ml_set``."""
    return identify(word, potential, candidates, tie_tol)


def min_entropy_set(word, potential: Potential, candidates,
                    tie_tol: float = DEFAULT_TIE_TOL) -> IdentificationOutcome:
    """Minimum-entropy identification over candidates admitting the word;
    the answer is ``outcome.min_entropy_set``."""
    return identify(word, potential, candidates, tie_tol)


def identify_curve(chain: GibbsChain, potential: Potential, candidates, checkpoints,
                   seed: int, tie_tol: float = DEFAULT_TIE_TOL,
                   candidate_chains=None) -> list[IdentificationOutcome]:
    """Sample one word from ``chain`` and identify along its prefixes.

    A single path of length ``max(checkpoints)`` is drawn with ``seed`` and
    scored at each checkpoint, so the outcomes describe one trajectory of
    the learner.  Checkpoints must be strictly increasing positive lengths.
    """
    cps = [int(c) for c in checkpoints]
    if not cps:
        raise ValidationError("need at least one checkpoint")
    if cps[0] < 1:
        raise ValidationError("checkpoints must be at least 1 (the empty prefix is not scored)")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValidationError("checkpoints must be strictly increasing")
    word = sample(chain, max(cps[-1], chain.potential.range - 1), seed).word
    if candidate_chains is None:
        candidate_chains = tuple(gibbs_chain(g, potential) for g in tuple(candidates))
    return [identify(word[:c], potential, candidates, tie_tol, chains=candidate_chains)
            for c in cps]
