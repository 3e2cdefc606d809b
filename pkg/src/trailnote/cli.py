"""Command-line entry point wiring every stage of the analysis pipeline.

Subcommands:

    ingest          raw event lines -> filtered, time-sorted logs + summaries
    simulate        synthetic cohort: event log and labeled notes
    mine-patterns   frequent interaction subsequences from logs
    build-features  per-note feature matrix as CSV
    train           fit a classifier on a participant-disjoint split
    evaluate        score a saved model on its held-out participants
    explain         Shapley attributions for scored notes
    stats           participant-level rank correlations
    serve           run the HTTP service

A JSON config file (``--config``) may supply any flag for the chosen
subcommand by its long name with dashes as underscores; flags given on the
command line win. Artifacts are written atomically (temp file + rename) and
are byte-identical across runs with the same inputs and seeds.

Exit codes: 0 success, 1 data or processing error, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from .actions import ActionTaxonomy, default_taxonomy, load_taxonomy
from .attribution import (
    EXACT_MAX_FEATURES,
    attribution_to_json,
    exact_shapley,
    sampled_shapley,
)
from .attribution import summarize as summarize_attributions
from .errors import DegenerateDataError, EmptyDataError, TrailnoteError
from .eventlog import HOVER_MIN_MS, IDLE_THRESHOLD_MS, ingest_file, serialize_logs, summarize
from .features import (
    ACTION_COUNTS,
    PATTERN_COUNTS,
    REFERENCE_COUNTS,
    WINDOW_CUMULATIVE,
    WINDOW_POLICIES,
    build_matrix,
    participant_aggregates,
    read_matrix,
    write_matrix,
)
from .learn import evaluate, load_model, model_document, split_matrix, train_forest, train_linear
from .learn.forest import N_TREES
from .learn.persist import dumps_model
from .mining import (
    MAX_LEN,
    MIN_LEN,
    T1_FRACTION,
    T2_FRACTION,
    mine_patterns,
    pattern_set_from_json,
    pattern_set_to_json,
)
from .notes import read_notes, write_notes
from .simulate import generate_cohort, load_profiles
from .stats import N_BOOTSTRAP, REPORT_TAU_MIN, bonferroni, kendall_tau_b

_FEATURE_CHOICES = {
    "actions": ACTION_COUNTS,
    "references": REFERENCE_COUNTS,
    "patterns": PATTERN_COUNTS,
}
_TARGET_CHOICES = ("category", "overview_detail", "prior_knowledge")


def _write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _require_input(path: str, flag: str) -> None:
    if not os.path.exists(path):
        print(f"error: {flag}: no such file: {path}", file=sys.stderr)
        raise SystemExit(2)


def _taxonomy(args) -> ActionTaxonomy:
    if getattr(args, "taxonomy", None):
        _require_input(args.taxonomy, "--taxonomy")
        return load_taxonomy(args.taxonomy)
    return default_taxonomy()


# ---- subcommand handlers ----


def _cmd_ingest(args) -> int:
    _require_input(args.events, "--events")
    tax = _taxonomy(args)
    with open(args.events, encoding="utf-8") as fh:
        logs = ingest_file(fh, hover_min_ms=args.hover_min_ms, taxonomy=tax)
    buf = io.StringIO()
    serialize_logs(logs, buf)
    _write_atomic(args.out, buf.getvalue())
    if args.summary:
        doc = {
            pid: asdict(summarize(log, idle_threshold_ms=args.idle_ms, taxonomy=tax))
            for pid, log in logs.items()
        }
        _write_atomic(args.summary, _dump_json(doc))
    print(f"ingested {sum(len(l.events) for l in logs.values())} events "
          f"from {len(logs)} participants -> {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    profiles = None
    if args.profiles:
        _require_input(args.profiles, "--profiles")
        profiles = load_profiles(args.profiles)
    logs, notes = generate_cohort(
        profile_set=profiles,
        n_participants=args.participants,
        seed=args.seed,
        noise=args.noise,
    )
    buf = io.StringIO()
    serialize_logs(logs, buf)
    _write_atomic(args.out_events, buf.getvalue())
    buf = io.StringIO()
    write_notes(notes, buf)
    _write_atomic(args.out_notes, buf.getvalue())
    print(f"simulated {len(logs)} participants, {len(notes)} notes "
          f"-> {args.out_events}, {args.out_notes}")
    return 0


def _cmd_mine_patterns(args) -> int:
    _require_input(args.events, "--events")
    tax = _taxonomy(args)
    with open(args.events, encoding="utf-8") as fh:
        logs = ingest_file(fh, hover_min_ms=args.hover_min_ms, taxonomy=tax)
    patterns = mine_patterns(
        logs,
        t1_fraction=args.t1,
        t2_fraction=args.t2,
        min_len=args.min_len,
        max_len=args.max_len,
    )
    _write_atomic(args.out, _dump_json(pattern_set_to_json(patterns)))
    print(f"mined {len(patterns.final_patterns)} final patterns "
          f"({len(patterns.sequence_candidates)} candidates, "
          f"{len(patterns.run_patterns)} run patterns) -> {args.out}")
    return 0


def _cmd_build_features(args) -> int:
    _require_input(args.events, "--events")
    _require_input(args.notes, "--notes")
    tax = _taxonomy(args)
    with open(args.events, encoding="utf-8") as fh:
        logs = ingest_file(fh, hover_min_ms=args.hover_min_ms, taxonomy=tax)
    with open(args.notes, encoding="utf-8") as fh:
        notes = read_notes(fh)
    kinds = []
    for name in args.features.split(","):
        name = name.strip()
        if name not in _FEATURE_CHOICES:
            print(f"error: --features: unknown kind {name!r} "
                  f"(choose from {', '.join(_FEATURE_CHOICES)})", file=sys.stderr)
            raise SystemExit(2)
        kinds.append(_FEATURE_CHOICES[name])
    patterns = None
    if PATTERN_COUNTS in kinds:
        if not args.patterns:
            print("error: --patterns is required when pattern features are requested",
                  file=sys.stderr)
            raise SystemExit(2)
        _require_input(args.patterns, "--patterns")
        with open(args.patterns, encoding="utf-8") as fh:
            patterns = pattern_set_from_json(json.load(fh))
    matrix = build_matrix(
        notes,
        logs,
        kinds=kinds,
        label_aspect=args.target,
        patterns=patterns,
        taxonomy=tax,
        policy=args.window,
        drop_unlabeled=args.drop_unlabeled,
    )
    buf = io.StringIO()
    write_matrix(matrix, buf)
    _write_atomic(args.out, buf.getvalue())
    print(f"built {matrix.X.shape[0]}x{matrix.X.shape[1]} feature matrix -> {args.out}")
    return 0


def _cmd_train(args) -> int:
    _require_input(args.features, "--features")
    with open(args.features, encoding="utf-8") as fh:
        matrix = read_matrix(fh, label_aspect=args.target)
    plan, train_rows, test_rows = split_matrix(
        matrix, train_fraction=args.train_fraction, seed=args.seed
    )
    X_train = matrix.X[train_rows]
    y_train = [matrix.labels[i] for i in train_rows]
    if args.model == "forest":
        model = train_forest(
            X_train,
            y_train,
            matrix.feature_names,
            n_trees=args.trees,
            max_features=args.max_features,
            min_leaf=args.min_leaf,
            seed=args.seed,
            workers=args.workers,
        )
    else:
        model = train_linear(X_train, y_train, matrix.feature_names, seed=args.seed)
    X_test = matrix.X[test_rows]
    y_test = [matrix.labels[i] for i in test_rows]
    report = evaluate(model, X_test, y_test, n_bootstrap=args.bootstrap, seed=args.seed)
    doc = model_document(
        model,
        label_aspect=args.target,
        split=plan.to_json(),
        evaluation=report.to_json(),
    )
    _write_atomic(args.out, dumps_model(doc))
    print(f"trained {args.model} on {len(train_rows)} notes "
          f"({len(plan.train_participants)} participants); held-out kappa "
          f"{report.kappa:.3f} ({report.kappa_band}) -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    if not os.path.exists(args.model):
        print("no-model-loaded", file=sys.stderr)
        return 1
    _require_input(args.features, "--features")
    with open(args.model, encoding="utf-8") as fh:
        model, doc = load_model(fh)
    with open(args.features, encoding="utf-8") as fh:
        matrix = read_matrix(fh, label_aspect=doc.get("label_aspect"))
    if list(matrix.feature_names) != list(model.feature_names):
        print("error: feature columns do not match the model", file=sys.stderr)
        return 1
    split = doc.get("split") or {}
    test_pids = set(split.get("test_participants", ()))
    rows = [
        i
        for i, (pid, label) in enumerate(zip(matrix.participant_ids, matrix.labels))
        if label is not None and (not test_pids or pid in test_pids)
    ]
    X_test = matrix.X[rows]
    y_test = [matrix.labels[i] for i in rows]
    report = evaluate(model, X_test, y_test, n_bootstrap=args.bootstrap, seed=args.seed)
    _write_atomic(args.out, _dump_json(report.to_json()))
    scope = "held-out participants" if test_pids else "all labeled notes"
    print(f"evaluated on {len(rows)} notes ({scope}): accuracy {report.accuracy:.3f}, "
          f"kappa {report.kappa:.3f} ({report.kappa_band}) -> {args.out}")
    return 0


def _cmd_explain(args) -> int:
    if not os.path.exists(args.model):
        print("no-model-loaded", file=sys.stderr)
        return 1
    _require_input(args.features, "--features")
    with open(args.model, encoding="utf-8") as fh:
        model, doc = load_model(fh)
    if not hasattr(model, "predict_proba"):
        print("error: attribution needs a model with class probabilities", file=sys.stderr)
        return 1
    with open(args.features, encoding="utf-8") as fh:
        matrix = read_matrix(fh, label_aspect=doc.get("label_aspect"))
    if list(matrix.feature_names) != list(model.feature_names):
        print("error: feature columns do not match the model", file=sys.stderr)
        return 1

    split = doc.get("split") or {}
    train_pids = set(split.get("train_participants", ()))
    test_pids = set(split.get("test_participants", ()))
    if args.note:
        wanted = set(args.note)
        rows = [i for i, nid in enumerate(matrix.note_ids) if nid in wanted]
        missing = wanted - {matrix.note_ids[i] for i in rows}
        if missing:
            print(f"error: notes not in the feature matrix: {sorted(missing)}",
                  file=sys.stderr)
            return 1
    elif test_pids:
        rows = [i for i, pid in enumerate(matrix.participant_ids) if pid in test_pids]
    else:
        rows = list(range(matrix.X.shape[0]))
    if args.limit is not None:
        rows = rows[: args.limit]
    if not rows:
        print("error: no notes selected for attribution", file=sys.stderr)
        return 1

    if train_pids:
        bg_rows = [i for i, pid in enumerate(matrix.participant_ids) if pid in train_pids]
        background = matrix.X[bg_rows] if bg_rows else matrix.X
    else:
        background = matrix.X

    d = matrix.X.shape[1]
    method = args.method
    if method == "auto":
        method = "exact" if d <= EXACT_MAX_FEATURES else "sampled"
    attributions = []
    for i in rows:
        if method == "exact":
            a = exact_shapley(
                model,
                matrix.X[i],
                background,
                feature_names=matrix.feature_names,
                note_id=matrix.note_ids[i],
            )
        else:
            a = sampled_shapley(
                model,
                matrix.X[i],
                background,
                n_permutations=args.permutations,
                seed=args.seed,
                feature_names=matrix.feature_names,
                note_id=matrix.note_ids[i],
            )
        attributions.append(a)
    summary = summarize_attributions(attributions, top_k=args.top_k)
    out = {
        "method": summary.method,
        "n_cases": summary.n_cases,
        "ranking": list(summary.ranking),
        "mean_abs_phi": dict(summary.mean_abs_phi),
        "scatter": {k: [list(p) for p in v] for k, v in summary.scatter.items()},
        "attributions": [attribution_to_json(a) for a in attributions],
    }
    _write_atomic(args.out, _dump_json(out))
    top = ", ".join(summary.ranking[:3])
    print(f"attributed {len(rows)} notes ({method}); strongest features: {top} -> {args.out}")
    return 0


def _cmd_stats(args) -> int:
    _require_input(args.events, "--events")
    _require_input(args.notes, "--notes")
    tax = _taxonomy(args)
    with open(args.events, encoding="utf-8") as fh:
        logs = ingest_file(fh, hover_min_ms=args.hover_min_ms, taxonomy=tax)
    with open(args.notes, encoding="utf-8") as fh:
        notes = read_notes(fh)
    aggregates = participant_aggregates(notes, logs, taxonomy=tax)

    predictors: dict[str, list[float | None]] = {}
    for group in ("data-exploration", "note-exploration", "edit"):
        predictors[f"actions_{group}"] = [
            float(a.action_group_counts[group]) for a in aggregates
        ]
    ref_kinds = sorted(aggregates[0].reference_type_means) if aggregates else []
    for kind in ref_kinds:
        predictors[f"mean_refs_{kind}"] = [
            float(a.reference_type_means[kind]) for a in aggregates
        ]
    outcomes = {
        "mean_overview_detail": [a.mean_overview_detail for a in aggregates],
        "mean_prior_knowledge": [a.mean_prior_knowledge for a in aggregates],
    }

    computed = []
    skipped = []
    for x_name in sorted(predictors):
        for y_name in sorted(outcomes):
            xs, ys = [], []
            for xv, yv in zip(predictors[x_name], outcomes[y_name]):
                if yv is not None:
                    xs.append(xv)
                    ys.append(float(yv))
            try:
                r = kendall_tau_b(xs, ys, n_bootstrap=args.bootstrap, seed=args.seed,
                                  level=args.level)
            except (DegenerateDataError, EmptyDataError) as exc:
                skipped.append({"x": x_name, "y": y_name, "reason": str(exc)})
                continue
            computed.append((x_name, y_name, r))

    adjusted = bonferroni([r.p_value for _, _, r in computed]) if computed else []
    entries = []
    for (x_name, y_name, r), p_adj in zip(computed, adjusted):
        entries.append(
            {
                "x": x_name,
                "y": y_name,
                "n": r.n,
                "tau_b": r.tau_b,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
                "p_value": r.p_value,
                "p_adjusted": p_adj,
                "reportable": r.reportable,
            }
        )
    reported = entries if args.report_all else [e for e in entries if e["reportable"]]
    out = {
        "n_participants": len(aggregates),
        "analyses_count": len(computed),
        "min_abs_tau_reported": REPORT_TAU_MIN,
        "correlations": reported,
        "skipped": skipped,
    }
    _write_atomic(args.out, _dump_json(out))
    print(f"computed {len(computed)} correlations over {len(aggregates)} participants; "
          f"{len(reported)} reported -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import NoteStore, create_app, serve

    model = None
    doc = None
    if args.model:
        _require_input(args.model, "--model")
        with open(args.model, encoding="utf-8") as fh:
            model, doc = load_model(fh)
    store = NoteStore(args.data_dir)
    if args.notes:
        _require_input(args.notes, "--notes")
        with open(args.notes, encoding="utf-8") as fh:
            for note in read_notes(fh):
                store.put_note(note)
    app = create_app(store, taxonomy=_taxonomy(args), token=args.token,
                     model=model, model_doc=doc)
    serve(app, host=args.host, port=args.port)
    return 0


# ---- parser construction ----


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="trailnote",
        description="Interaction-trail analysis for entity-cited notes.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file supplying flag defaults")
    subparsers: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, parents=[common], formatter_class=fmt)
        subparsers[name] = p
        return p

    p = add("ingest", "filter and sort raw event lines into per-participant logs")
    p.add_argument("--events", required=True, help="input events file, one JSON object per line")
    p.add_argument("--out", required=True, help="output path for the filtered event log")
    p.add_argument("--summary", help="optional path for per-participant summaries")
    p.add_argument("--hover-min-ms", type=int, default=HOVER_MIN_MS,
                   help="shortest hover kept, in milliseconds")
    p.add_argument("--idle-ms", type=int, default=IDLE_THRESHOLD_MS,
                   help="gap treated as idle time in summaries, in milliseconds")
    p.add_argument("--taxonomy", help="override the packaged action vocabulary file")

    p = add("simulate", "generate a synthetic cohort of logs and labeled notes")
    p.add_argument("--out-events", required=True, help="output events file")
    p.add_argument("--out-notes", required=True, help="output notes file")
    p.add_argument("--participants", type=int, default=158, help="cohort size")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--noise", type=float, default=None,
                   help="override the per-profile label noise rate")
    p.add_argument("--profiles", help="override the packaged behavior profiles file")

    p = add("mine-patterns", "extract frequent interaction subsequences")
    p.add_argument("--events", required=True, help="input events file")
    p.add_argument("--out", required=True, help="output path for the pattern set")
    p.add_argument("--t1", type=float, default=T1_FRACTION,
                   help="candidate support threshold, as a fraction of participants")
    p.add_argument("--t2", type=float, default=T2_FRACTION,
                   help="final support threshold, as a fraction of participants")
    p.add_argument("--min-len", type=int, default=MIN_LEN, help="shortest subsequence")
    p.add_argument("--max-len", type=int, default=MAX_LEN, help="longest subsequence")
    p.add_argument("--hover-min-ms", type=int, default=HOVER_MIN_MS,
                   help="shortest hover kept, in milliseconds")
    p.add_argument("--taxonomy", help="override the packaged action vocabulary file")

    p = add("build-features", "assemble the per-note feature matrix")
    p.add_argument("--events", required=True, help="input events file")
    p.add_argument("--notes", required=True, help="input notes file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--features", default="actions",
                   help="comma-separated kinds: actions, references, patterns")
    p.add_argument("--target", choices=_TARGET_CHOICES, default=None,
                   help="label aspect to attach to each row")
    p.add_argument("--patterns", help="mined pattern set (required for pattern features)")
    p.add_argument("--window", choices=WINDOW_POLICIES, default=WINDOW_CUMULATIVE,
                   help="event window preceding each note")
    p.add_argument("--drop-unlabeled", action="store_true",
                   help="leave out notes without the target label")
    p.add_argument("--hover-min-ms", type=int, default=HOVER_MIN_MS,
                   help="shortest hover kept, in milliseconds")
    p.add_argument("--taxonomy", help="override the packaged action vocabulary file")

    p = add("train", "fit a classifier on a participant-disjoint split")
    p.add_argument("--features", required=True, help="feature matrix CSV")
    p.add_argument("--out", required=True, help="output model path")
    p.add_argument("--model", choices=("forest", "linear"), default="forest",
                   help="classifier kind")
    p.add_argument("--target", choices=_TARGET_CHOICES, default=None,
                   help="label aspect recorded with the model")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--trees", type=int, default=N_TREES, help="trees in the forest")
    p.add_argument("--min-leaf", type=int, default=1, help="smallest leaf size")
    p.add_argument("--max-features", type=int, default=None,
                   help="features tried per split (default: floor of sqrt of d)")
    p.add_argument("--workers", type=int, default=1, help="threads for tree growing")
    p.add_argument("--train-fraction", type=float, default=0.8,
                   help="share of notes assigned to training participants")
    p.add_argument("--bootstrap", type=int, default=N_BOOTSTRAP,
                   help="bootstrap replicates for interval half-widths")

    p = add("evaluate", "score a saved model on its held-out participants")
    p.add_argument("--model", required=True, help="saved model path")
    p.add_argument("--features", required=True, help="feature matrix CSV")
    p.add_argument("--out", required=True, help="output report path")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.add_argument("--bootstrap", type=int, default=N_BOOTSTRAP,
                   help="bootstrap replicates for interval half-widths")

    p = add("explain", "Shapley attributions for scored notes")
    p.add_argument("--model", required=True, help="saved model path")
    p.add_argument("--features", required=True, help="feature matrix CSV")
    p.add_argument("--out", required=True, help="output attributions path")
    p.add_argument("--method", choices=("auto", "exact", "sampled"), default="auto",
                   help="exact enumerates coalitions; sampled permutes")
    p.add_argument("--permutations", type=int, default=2000,
                   help="permutations for the sampled estimator")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--note", action="append", default=None,
                   help="explain only this note id (repeatable)")
    p.add_argument("--limit", type=int, default=None, help="cap the number of notes")
    p.add_argument("--top-k", type=int, default=None,
                   help="truncate the summary to the strongest features")

    p = add("stats", "participant-level rank correlations with adjustment")
    p.add_argument("--events", required=True, help="input events file")
    p.add_argument("--notes", required=True, help="input notes file")
    p.add_argument("--out", required=True, help="output report path")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.add_argument("--bootstrap", type=int, default=N_BOOTSTRAP,
                   help="bootstrap replicates for confidence intervals")
    p.add_argument("--level", type=float, default=0.95, help="confidence level")
    p.add_argument("--report-all", action="store_true",
                   help="include correlations below the reporting cutoff")
    p.add_argument("--hover-min-ms", type=int, default=HOVER_MIN_MS,
                   help="shortest hover kept, in milliseconds")
    p.add_argument("--taxonomy", help="override the packaged action vocabulary file")

    p = add("serve", "run the HTTP service")
    p.add_argument("--data-dir", required=True, help="directory for the durable store")
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8000, help="bind port")
    p.add_argument("--model", default=None, help="optional saved model to serve")
    p.add_argument("--token", default=None, help="static bearer token; unset disables auth")
    p.add_argument("--notes", default=None, help="optional notes file to preload")
    p.add_argument("--taxonomy", help="override the packaged action vocabulary file")

    return parser, subparsers


_HANDLERS = {
    "ingest": _cmd_ingest,
    "simulate": _cmd_simulate,
    "mine-patterns": _cmd_mine_patterns,
    "build-features": _cmd_build_features,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "explain": _cmd_explain,
    "stats": _cmd_stats,
    "serve": _cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()

    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        _require_input(known.config, "--config")
        with open(known.config, encoding="utf-8") as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                print(f"error: --config: not valid JSON: {exc}", file=sys.stderr)
                return 2
        if not isinstance(cfg, dict):
            print("error: --config: the file must hold a JSON object", file=sys.stderr)
            return 2
        command = next((a for a in argv if not a.startswith("-")), None)
        if command in subparsers:
            p = subparsers[command]
            valid = {a.dest for a in p._actions}
            unknown = set(cfg) - valid
            if unknown:
                print(f"error: --config: unknown keys for {command}: {sorted(unknown)}",
                      file=sys.stderr)
                return 2
            p.set_defaults(**cfg)
            # config may satisfy flags argparse would otherwise demand
            for action in p._actions:
                if action.dest in cfg:
                    action.required = False

    args = parser.parse_args(argv)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except TrailnoteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
