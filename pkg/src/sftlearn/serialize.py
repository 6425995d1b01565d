"""JSON and CSV converters for the stable on-disk formats.

Grammars travel as ``{"theta": int, "matrix": [[0/1, ...], ...]}`` and
potentials as ``{"theta": int, "range": int, "entries": [{"word": "110",
"value": 2.5}, ...]}`` with unlisted words reading 0.  Log likelihoods of
forbidden words serialize as the string ``"-inf"`` and undefined entropies
as ``null``.  ``dumps`` renders deterministically (sorted keys, fixed
layout) so identical inputs always produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .gibbs import Potential, Sample
from .identify import IdentificationOutcome
from .symbolic import Grammar, Lexicon, ValidationError, format_word, parse_word


def grammar_to_dict(g: Grammar) -> dict:
    return {"theta": g.lexicon.theta, "matrix": [list(row) for row in g.matrix]}


def grammar_from_dict(data) -> Grammar:
    if not isinstance(data, dict) or "theta" not in data or "matrix" not in data:
        raise ValidationError(f"grammar object needs 'theta' and 'matrix' fields, got {data!r}")
    return Grammar(Lexicon(int(data["theta"])),
                   tuple(tuple(int(x) for x in row) for row in data["matrix"]))


def potential_to_dict(p: Potential) -> dict:
    return {
        "theta": p.lexicon.theta,
        "range": p.range,
        "entries": [{"word": format_word(w), "value": v} for w, v in p.entries],
    }


def potential_from_dict(data) -> Potential:
    if not isinstance(data, dict):
        raise ValidationError(f"potential object must be a JSON object, got {data!r}")
    for field in ("theta", "range"):
        if field not in data:
            raise ValidationError(f"potential object is missing the '{field}' field")
    entries = []
    for item in data.get("entries", ()):
        if "word" not in item or "value" not in item:
            raise ValidationError(f"potential entry needs 'word' and 'value', got {item!r}")
        word = item["word"]
        entries.append((parse_word(word) if isinstance(word, str) else tuple(word),
                        float(item["value"])))
    return Potential(Lexicon(int(data["theta"])), int(data["range"]), tuple(entries))


def _encode_float(x: float):
    """JSON has no infinities; ship them as strings."""
    if x is None or math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def encode_floats(obj):
    """Recursively apply :func:`_encode_float` through dicts and lists."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _encode_float(obj)
    if isinstance(obj, dict):
        return {k: encode_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_floats(v) for v in obj]
    return obj


def score_to_dict(score) -> dict:
    return {
        "grammar": grammar_to_dict(score.grammar),
        "log_likelihood": _encode_float(score.log_likelihood),
        "entropy": score.entropy,
    }


def outcome_to_dict(outcome: IdentificationOutcome) -> dict:
    return {
        "n": outcome.n,
        "scores": [score_to_dict(s) for s in outcome.scores],
        "ml_set": list(outcome.ml_indices),
        "min_entropy_set": list(outcome.min_entropy_indices),
        "none_admissible": outcome.none_admissible,
    }


def sample_to_dict(s: Sample) -> dict:
    return {
        "word": format_word(s.word),
        "length": len(s.word),
        "seed": s.seed,
        "grammar": grammar_to_dict(s.grammar),
        "potential": potential_to_dict(s.potential),
    }


def chain_summary(chain) -> dict:
    return {"pressure": chain.pressure, "entropy": chain.entropy, "lambda": chain.lam}


def dumps(obj) -> str:
    """Deterministic JSON rendering: sorted keys, two-space indent, newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


CSV_HEADER = ("n", "frequency", "mean_score_gap")


def csv_text(rows, header=CSV_HEADER) -> str:
    """Render curve rows as RFC-4180 CSV with a newline terminator."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if x is None else x for x in row])
    return buf.getvalue()
