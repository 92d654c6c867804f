"""End-to-end sense induction: queries -> distributions -> representatives ->
clusters -> soft assignments, plus the ablation grid, the cluster-count sweep,
and the repeated-run protocol.

All randomness is derived from (seed, instance_id, rep, draw), so results are
independent of worker count and processing order; run r of an R-run protocol
uses seed + r.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .backends import LMBackend
from .clustering import agglomerative_cluster, build_matrix, induce_soft, tfidf
from .corpus import Instance, InstanceDataset, Labeling, Target, write_key_file
from .evaluation import RunStatistics, ScoreReport, aggregate_runs, score_labelings
from .lemmatizer import RuleLemmatizer, identity_lemmatizer
from .representatives import SamplingConfig, sample_representatives
from .substitutes import Lemmatizer, Query, build_queries, postprocess


@dataclass(frozen=True)
class PipelineConfig:
    use_pattern: bool = True
    use_lemmatization: bool = True
    use_tfidf: bool = True
    cutoff: int = 50
    k: int = 20
    samples_per_side: int = 4
    clusters: int = 7
    runs: int = 1
    seed: int = 0
    conjunction: str = "and"
    workers: int = 1

    def __post_init__(self):
        for name in ("cutoff", "k", "samples_per_side", "clusters", "runs", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


def _induce_target(
    instances: Sequence[Instance],
    backend: LMBackend,
    config: PipelineConfig,
    lemmatizer: Lemmatizer,
):
    reps = []
    sampling = SamplingConfig(k=config.k, samples_per_side=config.samples_per_side, seed=config.seed)
    for inst in instances:
        fwd_q, bwd_q = build_queries(inst, config.use_pattern, config.conjunction)
        fwd = postprocess(backend.predict(fwd_q), lemmatizer, config.cutoff, pos_hint=inst.target.pos)
        bwd = postprocess(backend.predict(bwd_q), lemmatizer, config.cutoff, pos_hint=inst.target.pos)
        reps.extend(sample_representatives(fwd, bwd, sampling))
    fm = tfidf(build_matrix(reps), enabled=config.use_tfidf)
    labels = agglomerative_cluster(fm, config.clusters)
    return induce_soft(labels, fm.row_meta, config.k), reps, labels, fm.row_meta


def induce(
    config: PipelineConfig,
    dataset: InstanceDataset,
    backend: LMBackend,
    lemmatizer: Optional[Lemmatizer] = None,
    dump_dir: Optional[str] = None,
) -> Tuple[Labeling, Dict[str, Target]]:
    """Induce a soft sense assignment for every instance in the dataset.

    Returns (assignment, instance_id -> Target). Targets are processed in
    sorted lemma.pos order, optionally on a bounded worker pool. With
    dump_dir set, debug dumps of sampled representatives and per-row cluster
    labels are written there as line-delimited records.
    """
    if not dataset.instances:
        raise ValueError("dataset has no instances")
    if lemmatizer is None:
        lemmatizer = RuleLemmatizer() if config.use_lemmatization else identity_lemmatizer
    elif not config.use_lemmatization:
        lemmatizer = identity_lemmatizer

    groups = sorted(dataset.by_target().items(), key=lambda kv: kv[0].key)
    assignment: Labeling = {}
    targets: Dict[str, Target] = {}
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda g: _induce_target(g[1], backend, config, lemmatizer), groups))
    else:
        results = [_induce_target(insts, backend, config, lemmatizer) for _, insts in groups]
    for (target, insts), (result, _, _, _) in zip(groups, results):
        assignment.update(result)
        for inst in insts:
            targets[inst.instance_id] = target
    if dump_dir is not None:
        _write_dumps(dump_dir, results)
    return assignment, targets


def _write_dumps(dump_dir: str, results) -> None:
    import json
    import os

    os.makedirs(dump_dir, exist_ok=True)
    rep_lines = []
    cluster_lines = []
    for _, reps, labels, row_meta in results:
        for rep, label, (instance_id, rep_index) in zip(reps, labels, row_meta):
            rep_lines.append(
                json.dumps(
                    {"instance_id": instance_id, "rep_index": rep_index, "words": list(rep.words)},
                    ensure_ascii=False,
                )
            )
            cluster_lines.append(
                json.dumps(
                    {"instance_id": instance_id, "rep_index": rep_index, "cluster": f"c{int(label)}"},
                    ensure_ascii=False,
                )
            )
    with open(os.path.join(dump_dir, "representatives.jsonl"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(rep_lines) + "\n")
    with open(os.path.join(dump_dir, "clusters.jsonl"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(cluster_lines) + "\n")


def induce_key_text(config: PipelineConfig, dataset: InstanceDataset, backend: LMBackend) -> str:
    assignment, targets = induce(config, dataset, backend)
    return write_key_file(assignment, targets)


def run_protocol(
    config: PipelineConfig,
    dataset: InstanceDataset,
    backend: LMBackend,
    gold: Labeling,
    score_kwargs: Optional[dict] = None,
) -> Tuple[List[ScoreReport], Dict[str, RunStatistics]]:
    """Repeat induce+score config.runs times with seeds seed..seed+runs-1."""
    reports = []
    for r in range(config.runs):
        run_config = replace(config, seed=config.seed + r, runs=1)
        assignment, targets = induce(run_config, dataset, backend)
        reports.append(score_labelings(gold, assignment, targets, **(score_kwargs or {})))
    return reports, aggregate_runs(reports)


ABLATION_SETTINGS: Tuple[Tuple[str, bool, bool, bool], ...] = (
    # name, use_pattern, use_lemmatization, use_tfidf
    ("full", True, True, True),
    ("w/o SP", False, True, True),
    ("w/o LEM", True, False, True),
    ("w/o TFIDF", True, True, False),
    ("w/o LEM and SP", False, False, True),
    ("w/o ALL", False, False, False),
)


def ablate(
    config: PipelineConfig,
    dataset: InstanceDataset,
    backend: LMBackend,
    gold: Labeling,
    score_kwargs: Optional[dict] = None,
) -> Dict[str, Dict[str, Dict[str, RunStatistics]]]:
    """Run the toggle grid over config.runs seeds.

    Returns {setting: {"all" or pos value: {metric: RunStatistics}}}.
    """
    table: Dict[str, Dict[str, Dict[str, RunStatistics]]] = {}
    for name, sp, lem, tf in ABLATION_SETTINGS:
        setting = replace(config, use_pattern=sp, use_lemmatization=lem, use_tfidf=tf)
        reports, stats = run_protocol(setting, dataset, backend, gold, score_kwargs)
        breakdown = {"all": stats}
        for pos in sorted({t.pos for r in reports for t in r.per_target}, key=lambda p: p.value):
            pos_reports = [
                ScoreReport(fnmi=r.per_pos[pos][0], fbc=r.per_pos[pos][1], avg=r.per_pos[pos][2], per_target={}, per_pos={})
                for r in reports
                if pos in r.per_pos
            ]
            breakdown[pos.value] = aggregate_runs(pos_reports)
        table[name] = breakdown
    return table


def sweep_clusters(
    config: PipelineConfig,
    dataset: InstanceDataset,
    backend: LMBackend,
    gold: Labeling,
    counts: Iterable[int] = range(4, 16),
    score_kwargs: Optional[dict] = None,
) -> List[Tuple[int, float, float]]:
    """Induce and score once per cluster count; returns (count, mean AVG, std)."""
    curve = []
    for count in counts:
        setting = replace(config, clusters=count)
        _, stats = run_protocol(setting, dataset, backend, gold, score_kwargs)
        curve.append((count, stats["avg"].mean, stats["avg"].std))
    return curve


def export_queries(dataset: InstanceDataset, config: PipelineConfig) -> List[Query]:
    """Every (instance, direction) query under the config's pattern flag, in
    sorted instance order: the file the scoring bridge consumes."""
    queries = []
    for inst in sorted(dataset.instances, key=lambda i: i.instance_id):
        fwd, bwd = build_queries(inst, config.use_pattern, config.conjunction)
        queries.extend((fwd, bwd))
    return queries
