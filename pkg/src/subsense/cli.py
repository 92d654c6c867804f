"""Command line interface: induce, evaluate, ablate, sweep-clusters,
export-queries, make-synthetic."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .backends import FileBackend, train_ngram_backend, write_query_file
from .corpus import parse_instances, read_key_file, renormalize, write_key_file
from .evaluation import score_labelings, tense_sense_nmi
from .pipeline import PipelineConfig, ablate, export_queries, induce, run_protocol, sweep_clusters
from .synthetic import make_synthetic


def _write_atomic(path: str, text: str):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _add_pipeline_flags(p: argparse.ArgumentParser, with_backend: bool = True):
    p.add_argument("--instances", required=True, help="instance file (JSON lines)")
    if with_backend:
        p.add_argument("--backend", choices=("ngram", "file"), default="ngram")
        p.add_argument("--corpus", help="training corpus for the ngram backend (tokenized, one sentence per line)")
        p.add_argument("--order", type=int, default=3, help="ngram order")
        p.add_argument("--add-k", type=float, default=0.01, help="add-k smoothing constant")
        p.add_argument("--distributions", help="distribution file for the file backend")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--clusters", type=int, default=7)
    p.add_argument("--cutoff", type=int, default=50)
    p.add_argument("--k", type=int, default=20, help="representatives per instance")
    p.add_argument("--l", type=int, default=4, dest="samples_per_side", help="samples per direction per representative")
    p.add_argument("--no-sp", action="store_true", help="disable symmetric-pattern queries")
    p.add_argument("--no-lem", action="store_true", help="disable prediction lemmatization")
    p.add_argument("--no-tfidf", action="store_true", help="disable TF-IDF weighting")
    p.add_argument("--conjunction", default="and")
    p.add_argument("--workers", type=int, default=1)


def _add_score_flags(p: argparse.ArgumentParser):
    p.add_argument("--membership-threshold", type=float, default=0.0)
    p.add_argument("--geometric-targets", action="store_true", help="aggregate per-target scores geometrically")
    p.add_argument("--restrict-intersection", action="store_true", help="score only instances present on both sides")
    p.add_argument("--exclude", action="append", default=[], metavar="LEMMA.POS", help="drop a target from scoring (repeatable)")


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        use_pattern=not args.no_sp,
        use_lemmatization=not args.no_lem,
        use_tfidf=not args.no_tfidf,
        cutoff=args.cutoff,
        k=args.k,
        samples_per_side=args.samples_per_side,
        clusters=args.clusters,
        runs=args.runs,
        seed=args.seed,
        conjunction=args.conjunction,
        workers=args.workers,
    )


def _score_kwargs(args) -> dict:
    return {
        "membership_threshold": args.membership_threshold,
        "geometric_over_targets": args.geometric_targets,
        "restrict_to_intersection": args.restrict_intersection,
        "exclude_targets": args.exclude,
    }


def _backend_from_args(args):
    if args.backend == "file":
        if not args.distributions:
            raise SystemExit("--backend file requires --distributions")
        return FileBackend.load(args.distributions)
    if not args.corpus:
        raise SystemExit("--backend ngram requires --corpus")
    corpus = [line.split() for line in _read(args.corpus).splitlines() if line.strip()]
    return train_ngram_backend(corpus, order=args.order, add_k=args.add_k, top_k=max(100, args.cutoff))


def _print_report(report, per_pos: bool):
    print(f"FNMI {report.fnmi:7.2f}  FBC {report.fbc:7.2f}  AVG {report.avg:7.2f}")
    if per_pos:
        for pos, (f, b, a) in sorted(report.per_pos.items(), key=lambda kv: kv[0].value):
            print(f"  pos={pos.value}  FNMI {f:7.2f}  FBC {b:7.2f}  AVG {a:7.2f}")


def _report_records(report):
    rows = [{"scope": "corpus", "fnmi": report.fnmi, "fbc": report.fbc, "avg": report.avg}]
    for pos, (f, b, a) in sorted(report.per_pos.items(), key=lambda kv: kv[0].value):
        rows.append({"scope": f"pos:{pos.value}", "fnmi": f, "fbc": b, "avg": a})
    for target, (f, b) in sorted(report.per_target.items(), key=lambda kv: kv[0].key):
        rows.append({"scope": f"target:{target.key}", "fnmi": f, "fbc": b})
    return rows


def _cmd_induce(args):
    dataset = parse_instances(_read(args.instances))
    backend = _backend_from_args(args)
    config = _config_from_args(args)
    if args.runs == 1:
        assignment, targets = induce(config, dataset, backend, dump_dir=args.dump_dir)
        text = write_key_file(assignment, targets)
        if args.out:
            _write_atomic(args.out, text)
            print(f"wrote {args.out} ({len(assignment)} instances)")
        else:
            sys.stdout.write(text)
        if args.gold:
            gold, _ = read_key_file(_read(args.gold))
            report = score_labelings(gold, assignment, targets, **_score_kwargs(args))
            _print_report(report, per_pos=False)
        return
    if not args.gold:
        raise SystemExit("--runs > 1 requires --gold to aggregate scores")
    gold, _ = read_key_file(_read(args.gold))
    if args.out:
        out = Path(args.out)
        for r in range(args.runs):
            run_config = replace(config, seed=args.seed + r, runs=1)
            assignment, targets = induce(run_config, dataset, backend)
            path = str(out.with_name(f"{out.stem}.seed{args.seed + r}{out.suffix}"))
            _write_atomic(path, write_key_file(assignment, targets))
    _, stats = run_protocol(config, dataset, backend, gold, _score_kwargs(args))
    for metric in ("fnmi", "fbc", "avg"):
        s = stats[metric]
        print(f"{metric.upper():4s} mean {s.mean:7.2f}  std {s.std:6.2f}  runs {s.n_runs}")


def _cmd_evaluate(args):
    gold, gold_targets = read_key_file(_read(args.gold))
    system, _ = read_key_file(_read(args.system))
    if args.renormalize_system:
        system = renormalize(system)
    report = score_labelings(gold, system, gold_targets, **_score_kwargs(args))
    _print_report(report, per_pos=args.per_pos)
    if args.tense_nmi:
        if not args.instances:
            raise SystemExit("--tense-nmi requires --instances for tense metadata")
        dataset = parse_instances(_read(args.instances))
        verbs = [i for i in dataset.instances if i.tense is not None and i.instance_id in system]
        value = tense_sense_nmi(verbs, system, norm=args.nmi_norm)
        print(f"tense-sense NMI {value:.4f}")
    if args.out:
        rows = _report_records(report)
        _write_atomic(args.out, "\n".join(json.dumps(r) for r in rows) + "\n")


def _cmd_ablate(args):
    dataset = parse_instances(_read(args.instances))
    backend = _backend_from_args(args)
    gold, _ = read_key_file(_read(args.gold))
    table = ablate(_config_from_args(args), dataset, backend, gold, _score_kwargs(args))
    rows = []
    print(f"{'setting':>16s}  {'scope':>5s}  {'AVG mean':>9s}  {'std':>6s}")
    for setting, breakdown in table.items():
        for scope, stats in breakdown.items():
            s = stats["avg"]
            print(f"{setting:>16s}  {scope:>5s}  {s.mean:9.2f}  {s.std:6.2f}")
            rows.append(
                {
                    "setting": setting,
                    "scope": scope,
                    **{m: {"mean": st.mean, "std": st.std, "runs": st.n_runs} for m, st in stats.items()},
                }
            )
    if args.out:
        _write_atomic(args.out, "\n".join(json.dumps(r) for r in rows) + "\n")


def _cmd_sweep(args):
    dataset = parse_instances(_read(args.instances))
    backend = _backend_from_args(args)
    gold, _ = read_key_file(_read(args.gold))
    counts = range(args.min_clusters, args.max_clusters + 1)
    curve = sweep_clusters(_config_from_args(args), dataset, backend, gold, counts, _score_kwargs(args))
    print(f"{'clusters':>8s}  {'AVG mean':>9s}  {'std':>6s}")
    for count, avg_mean, avg_std in curve:
        print(f"{count:8d}  {avg_mean:9.2f}  {avg_std:6.2f}")
    if args.out:
        rows = [{"clusters": c, "avg_mean": m, "avg_std": s} for c, m, s in curve]
        _write_atomic(args.out, "\n".join(json.dumps(r) for r in rows) + "\n")


def _cmd_export_queries(args):
    dataset = parse_instances(_read(args.instances))
    config = PipelineConfig(use_pattern=not args.no_sp, conjunction=args.conjunction)
    queries = export_queries(dataset, config)
    _write_atomic(args.out, write_query_file(queries))
    print(f"wrote {args.out} ({len(queries)} queries)")


def _cmd_make_synthetic(args):
    data = make_synthetic(seed=args.seed, instances_per_sense=args.instances_per_sense)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_atomic(str(out / "corpus.txt"), "".join(" ".join(s) + "\n" for s in data.corpus))
    _write_atomic(str(out / "instances.jsonl"), data.instances_text)
    _write_atomic(str(out / "gold.key"), data.gold_text)
    print(f"pseudoword {data.pseudoword}: wrote corpus.txt, instances.jsonl, gold.key to {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subsense", description=__doc__)
    parser.add_argument("--config", help="key=value file of flag defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("induce", help="induce senses and write a key file")
    _add_pipeline_flags(p)
    _add_score_flags(p)
    p.add_argument("--out", help="output key file (stdout if omitted)")
    p.add_argument("--gold", help="gold key file for scoring")
    p.add_argument("--dump-dir", help="write representative/cluster debug dumps here (single-run only)")
    p.set_defaults(fn=_cmd_induce)

    p = sub.add_parser("evaluate", help="score a system key file against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--system", required=True)
    _add_score_flags(p)
    p.add_argument("--per-pos", action="store_true")
    p.add_argument("--renormalize-system", action="store_true", help="scale system weights to probabilities before scoring")
    p.add_argument("--tense-nmi", action="store_true", help="also report tense-sense NMI over verbs")
    p.add_argument("--instances", help="instance file with tense metadata (for --tense-nmi)")
    p.add_argument("--nmi-norm", choices=("max", "sqrt", "arithmetic"), default="max")
    p.add_argument("--out", help="write line-delimited report records here")
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("ablate", help="run the SP/LEM/TFIDF toggle grid")
    _add_pipeline_flags(p)
    _add_score_flags(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_ablate)

    p = sub.add_parser("sweep-clusters", help="score across cluster counts")
    _add_pipeline_flags(p)
    _add_score_flags(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--min-clusters", type=int, default=4)
    p.add_argument("--max-clusters", type=int, default=15)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("export-queries", help="write the query file for the scoring bridge")
    p.add_argument("--instances", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-sp", action="store_true")
    p.add_argument("--conjunction", default="and")
    p.set_defaults(fn=_cmd_export_queries)

    p = sub.add_parser("make-synthetic", help="generate a pseudoword corpus, instances, and gold")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances-per-sense", type=int, default=30)
    p.set_defaults(fn=_cmd_make_synthetic)

    return parser


def _load_config_defaults(path: str) -> dict:
    defaults = {}
    for line_no, line in enumerate(_read(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SystemExit(f"config {path} line {line_no}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if value.lower() in ("true", "false"):
            defaults[key] = value.lower() == "true"
        else:
            try:
                defaults[key] = int(value)
            except ValueError:
                try:
                    defaults[key] = float(value)
                except ValueError:
                    defaults[key] = value
    return defaults


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # pre-scan for --config so its values become defaults that explicit flags override
    config_path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif arg.startswith("--config="):
            config_path = arg.split("=", 1)[1]
    if config_path:
        defaults = _load_config_defaults(config_path)
        for sub in parser._subparsers._group_actions[0].choices.values():
            # map config keys through option names so e.g. "l" reaches the
            # samples_per_side dest
            dests = {}
            for action in sub._actions:
                dests[action.dest] = action.dest
                for opt in action.option_strings:
                    dests[opt.lstrip("-").replace("-", "_")] = action.dest
            sub.set_defaults(**{dests[k]: v for k, v in defaults.items() if k in dests})
    args = parser.parse_args(argv)
    args.fn(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
