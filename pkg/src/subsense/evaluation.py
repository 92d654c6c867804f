"""Scoring induced senses against fuzzy gold labelings.

FNMI treats every cluster (and every gold sense) as a binary membership
variable over instances and scores how well each side's variables are
explained by the other's, following the overlapping-cover normalized mutual
information of Lancichinetti et al.; FBC generalizes B-Cubed precision/recall
to graded memberships via min-overlap agreement between weight vectors. Both
are computed per target on a 0-100 scale and averaged across targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import mean
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .corpus import POS, Instance, Labeling, Target


def _h(p: float) -> float:
    return -p * math.log(p) if p > 0.0 else 0.0


def _check_same_items(x: Mapping, y: Mapping, what: str):
    if not x or not y:
        raise ValueError(f"{what}: empty labeling")
    if set(x) != set(y):
        missing = set(x) ^ set(y)
        raise ValueError(f"{what}: item sets differ (e.g. {sorted(missing)[:3]})")


def nmi(x: Mapping[str, str], y: Mapping[str, str], norm: str = "max") -> float:
    """Normalized mutual information between two hard labelings of the same
    items, I(X;Y)/max(H(X),H(Y)) by default (norm: "max", "sqrt" or
    "arithmetic"). Both labelings constant -> 1; zero information -> 0."""
    _check_same_items(x, y, "nmi")
    n = len(x)
    joint: Dict[Tuple[str, str], int] = {}
    cx: Dict[str, int] = {}
    cy: Dict[str, int] = {}
    for item, lx in x.items():
        ly = y[item]
        joint[(lx, ly)] = joint.get((lx, ly), 0) + 1
        cx[lx] = cx.get(lx, 0) + 1
        cy[ly] = cy.get(ly, 0) + 1
    hx = sum(_h(c / n) for c in cx.values())
    hy = sum(_h(c / n) for c in cy.values())
    if hx == 0.0 and hy == 0.0:
        return 1.0
    # I = H(X) + H(Y) - H(X,Y): exact 1.0 on identical partitions, where the
    # joint entropy repeats the marginal terms
    h_joint = sum(_h(c / n) for c in joint.values())
    info = hx + hy - h_joint
    if norm == "max":
        denom = max(hx, hy)
    elif norm == "sqrt":
        denom = math.sqrt(hx * hy)
    elif norm == "arithmetic":
        denom = 0.5 * (hx + hy)
    else:
        raise ValueError(f"unknown nmi normalization {norm!r}")
    if denom == 0.0:
        return 0.0
    return min(1.0, max(0.0, info / denom))


def _binarized_cover(labeling: Labeling, threshold: float) -> List[Set[str]]:
    clusters: Dict[str, Set[str]] = {}
    for item, weights in labeling.items():
        for label, weight in weights.items():
            if weight > threshold:
                clusters.setdefault(label, set()).add(item)
    return [clusters[label] for label in sorted(clusters)]


def _lfk_conditional(cover_x: List[Set[str]], cover_y: List[Set[str]], n: int) -> float:
    """Mean over X's clusters of H(X_i|Y)/H(X_i).

    A candidate match is rejected when its agreement entropies are dominated
    by the disagreement ones (the complement-match exclusion); a cluster with
    no accepted match keeps its full entropy. Constant clusters (H = 0) carry
    no information to explain and count as fully unexplained.
    """
    terms = []
    for a in cover_x:
        pa = len(a) / n
        h_a = _h(pa) + _h(1.0 - pa)
        if h_a == 0.0:
            terms.append(1.0)
            continue
        best = h_a
        for b in cover_y:
            n11 = len(a & b)
            n10 = len(a - b)
            n01 = len(b - a)
            n00 = n - n11 - n10 - n01
            h11 = _h(n11 / n)
            h10 = _h(n10 / n)
            h01 = _h(n01 / n)
            h00 = _h(n00 / n)
            if h11 + h00 < h10 + h01:
                continue
            pb = len(b) / n
            h_b = _h(pb) + _h(1.0 - pb)
            cond = max(0.0, h11 + h10 + h01 + h00 - h_b)
            if cond < best:
                best = cond
        terms.append(best / h_a)
    return sum(terms) / len(terms)


def fuzzy_nmi(gold: Labeling, sys: Labeling, membership_threshold: float = 0.0) -> float:
    """Overlapping-cover NMI between binarized gold senses and system
    clusters for one target, scaled to [0, 100]."""
    _check_same_items(gold, sys, "fuzzy_nmi")
    n = len(gold)
    gold_cover = _binarized_cover(gold, membership_threshold)
    sys_cover = _binarized_cover(sys, membership_threshold)
    if not gold_cover or not sys_cover:
        raise ValueError("fuzzy_nmi: empty cover after binarization")
    h_sys_given_gold = _lfk_conditional(sys_cover, gold_cover, n)
    h_gold_given_sys = _lfk_conditional(gold_cover, sys_cover, n)
    value = (1.0 - 0.5 * (h_sys_given_gold + h_gold_given_sys)) * 100.0
    return min(100.0, max(0.0, value))


def _overlap(w1: Mapping[str, float], w2: Mapping[str, float]) -> float:
    if len(w2) < len(w1):
        w1, w2 = w2, w1
    return sum(min(v, w2[label]) for label, v in w1.items() if label in w2)


def fuzzy_bcubed(gold: Labeling, sys: Labeling) -> float:
    """Fuzzy B-Cubed F1 for one target, scaled to [0, 100].

    Pair agreement is min(cluster overlap, sense overlap) relative to the
    side being scored; graded memberships are used as-is, and on hard
    labelings this reduces to classical B-Cubed (self-pairs included).
    """
    _check_same_items(gold, sys, "fuzzy_bcubed")
    items = sorted(gold)
    precisions = []
    recalls = []
    for e in items:
        p_scores = []
        r_scores = []
        for other in items:
            oc = _overlap(sys[e], sys[other])
            ol = _overlap(gold[e], gold[other])
            agree = min(oc, ol)
            if oc > 0:
                p_scores.append(agree / oc)
            if ol > 0:
                r_scores.append(agree / ol)
        precisions.append(sum(p_scores) / len(p_scores))
        recalls.append(sum(r_scores) / len(r_scores))
    precision = sum(precisions) / len(precisions)
    recall = sum(recalls) / len(recalls)
    if precision + recall == 0.0:
        return 0.0
    return 200.0 * precision * recall / (precision + recall)


def avg_score(fnmi: float, fbc: float) -> float:
    """Geometric mean of the two corpus scores."""
    if fnmi < 0 or fbc < 0:
        raise ValueError("scores must be nonnegative")
    return math.sqrt(fnmi * fbc)


@dataclass
class ScoreReport:
    fnmi: float
    fbc: float
    avg: float
    per_target: Dict[Target, Tuple[float, float]]
    per_pos: Dict[POS, Tuple[float, float, float]]


@dataclass
class RunStatistics:
    mean: float
    std: float
    n_runs: int


def score_labelings(
    gold: Labeling,
    sys: Labeling,
    targets: Mapping[str, Target],
    membership_threshold: float = 0.0,
    geometric_over_targets: bool = False,
    restrict_to_intersection: bool = False,
    exclude_targets: Iterable[str] = (),
) -> ScoreReport:
    """Score a system labeling against gold: per target, per POS, and corpus
    level. Targets are taken from the id -> Target map (usually the gold key
    file's first column)."""
    gold_ids = set(gold)
    sys_ids = set(sys)
    common = gold_ids & sys_ids
    if not common:
        raise ValueError("gold and system labelings share no instances")
    if not restrict_to_intersection and gold_ids != sys_ids:
        diff = sorted(gold_ids ^ sys_ids)[:3]
        raise ValueError(f"instance sets differ (e.g. {diff}); pass restrict_to_intersection to score the overlap")

    excluded = set(exclude_targets)
    by_target: Dict[Target, List[str]] = {}
    for instance_id in sorted(common):
        target = targets[instance_id]
        if target.key in excluded:
            continue
        by_target.setdefault(target, []).append(instance_id)
    if not by_target:
        raise ValueError("no targets left to score")

    per_target: Dict[Target, Tuple[float, float]] = {}
    for target, ids in sorted(by_target.items(), key=lambda kv: kv[0].key):
        g = {i: gold[i] for i in ids}
        s = {i: sys[i] for i in ids}
        per_target[target] = (
            fuzzy_nmi(g, s, membership_threshold),
            fuzzy_bcubed(g, s),
        )

    def combine(values: Sequence[float]) -> float:
        if geometric_over_targets:
            return math.exp(mean(math.log(v) for v in values)) if all(v > 0 for v in values) else 0.0
        return mean(values)

    def summarize(subset: Dict[Target, Tuple[float, float]]) -> Tuple[float, float, float]:
        f = combine([v[0] for v in subset.values()])
        b = combine([v[1] for v in subset.values()])
        return f, b, avg_score(f, b)

    per_pos = {}
    for pos in POS:
        subset = {t: v for t, v in per_target.items() if t.pos is pos}
        if subset:
            per_pos[pos] = summarize(subset)

    fnmi, fbc, avg = summarize(per_target)
    return ScoreReport(fnmi=fnmi, fbc=fbc, avg=avg, per_target=per_target, per_pos=per_pos)


def aggregate_runs(reports: Sequence[ScoreReport], population_std: bool = False) -> Dict[str, RunStatistics]:
    """Mean and (by default sample, n-1) standard deviation of each corpus
    metric over repeated runs."""
    if not reports:
        raise ValueError("no reports to aggregate")
    stats = {}
    for metric in ("fnmi", "fbc", "avg"):
        values = [getattr(r, metric) for r in reports]
        mu = mean(values)
        if len(values) == 1:
            sd = 0.0
        else:
            ddof = 0 if population_std else 1
            sd = math.sqrt(sum((v - mu) ** 2 for v in values) / (len(values) - ddof))
        stats[metric] = RunStatistics(mean=mu, std=sd, n_runs=len(values))
    return stats


def argmax_label(weights: Mapping[str, float]) -> str:
    """Highest-weight label, ties resolved to the lexicographically smallest."""
    return min(weights, key=lambda label: (-weights[label], label))


def tense_sense_nmi(instances: Sequence[Instance], sys: Labeling, norm: str = "max") -> float:
    """Mean over verb targets of NMI(tense, most probable cluster).

    Exactly one degenerate side (all tenses equal or all clusters equal)
    scores 0 for that target; both degenerate scores 1.
    """
    if not instances:
        raise ValueError("no instances")
    by_target: Dict[Target, List[Instance]] = {}
    for inst in instances:
        if inst.target.pos is not POS.VERB:
            raise ValueError(f"instance {inst.instance_id!r} is not a verb")
        if inst.tense is None:
            raise ValueError(f"instance {inst.instance_id!r} has no tense metadata")
        if inst.instance_id not in sys:
            raise ValueError(f"instance {inst.instance_id!r} missing from the assignment")
        by_target.setdefault(inst.target, []).append(inst)

    values = []
    for target, insts in sorted(by_target.items(), key=lambda kv: kv[0].key):
        tenses = {i.instance_id: i.tense.value for i in insts}
        clusters = {i.instance_id: argmax_label(sys[i.instance_id]) for i in insts}
        values.append(nmi(tenses, clusters, norm=norm))
    return mean(values)
