"""Command line front end.

Subcommands: generate a synthetic dataset, train the toy model, sweep the
consistency weight, score prediction files, evaluate the loss at a point,
and convert question/answer pairs to declarative propositions.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import dataio, synth
from .converter import BinaryQA, qa_to_proposition
from .errors import ConqaError
from .loss import consistency_loss, consistency_loss_grad
from .metric import PredictionSet, build_report
from .relations import build_graph
from .trainer import TrainConfig, summarize_sweep, sweep, train


def _cmd_generate(args) -> int:
    dataset = synth.generate(
        seed=args.seed,
        n_worlds=args.worlds,
        n_attr=args.attrs,
        queries_per_world=args.queries_per_world,
        match_relation_mix=args.match_relation_mix,
    )
    dataio.write_dataset(args.out, dataset)
    print(
        f"wrote {len(dataset.worlds)} worlds, {len(dataset.queries)} propositions, "
        f"{len(dataset.relations)} relations to {args.out}"
    )
    return 0


def _cmd_train_toy(args) -> int:
    dataset = dataio.read_dataset(args.data)
    config = TrainConfig(
        consistency_weight=args.weight,
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_pairs=args.batch_pairs,
        seed=args.seed,
    )
    result = train(dataset, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": dataclasses.asdict(config),
        **result.history.as_dict(),
    }
    with open(out / "metrics.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    dataio.write_predictions(out / "predictions.jsonl", result.predictions)
    last = result.history.epochs[-1]
    print(
        f"trained {config.epochs} epochs: held-out accuracy {last.accuracy:.4f}, "
        f"consistency {last.consistency:.4f}"
    )
    return 0


def _parse_floats(text: str):
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_ints(text: str):
    return [int(part) for part in text.split(",") if part.strip()]


def _cmd_sweep(args) -> int:
    dataset = dataio.read_dataset(args.data)
    base = TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, batch_pairs=args.batch_pairs
    )
    results = sweep(
        dataset,
        weights=_parse_floats(args.lambdas),
        seeds=_parse_ints(args.seeds),
        base_config=base,
        n_jobs=args.jobs,
    )
    with open(args.out_csv, "w", encoding="utf-8") as fh:
        fh.write("lambda,seed,accuracy,consistency\n")
        for res in results:
            fh.write(f"{res.weight!r},{res.seed},{res.accuracy!r},{res.consistency!r}\n")
    print(f"{'lambda':>8}  {'accuracy':>18}  {'consistency':>18}")
    for line in summarize_sweep(results):
        print(
            f"{line.weight:>8g}  "
            f"{line.accuracy_mean:.4f} +/- {line.accuracy_std:.4f}    "
            f"{line.consistency_mean:.4f} +/- {line.consistency_std:.4f}"
        )
    return 0


def _cmd_score(args) -> int:
    propositions = dataio.read_propositions(args.propositions)
    records = dataio.read_relations(args.relations)
    predictions = PredictionSet(dataio.read_predictions(args.predictions))
    graph = build_graph(records, propositions)
    report = build_report(graph, predictions)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2)
            fh.write("\n")
    print(f"arrows        {report.total_arrows}")
    print(f"violations    {report.inconsistencies}")
    print(f"consistency   {report.consistency:.4f}")
    print(f"accuracy      {report.accuracy:.4f}")
    for arrow in report.inconsistent_pairs:
        print(f"  violated: {arrow.image_id}: {arrow.sufficient} -> {arrow.necessary}")
    return 0


def _cmd_loss_eval(args) -> int:
    value = consistency_loss(args.sufficient, args.necessary)
    grad_s, grad_n = consistency_loss_grad(args.sufficient, args.necessary)
    print(
        json.dumps(
            {
                "p_sufficient": args.sufficient,
                "p_necessary": args.necessary,
                "lambda": args.weight,
                "loss": value,
                "grad_p_sufficient": grad_s,
                "grad_p_necessary": grad_n,
                "weighted_loss": args.weight * value,
            },
            indent=2,
        )
    )
    return 0


def _cmd_convert(args) -> int:
    out_rows = []
    error_rows = []
    for idx, row in enumerate(dataio.read_jsonl(args.infile)):
        row_id = str(row["id"]) if "id" in row else f"row{idx}"
        try:
            qa = BinaryQA(question=str(row["question"]), answer=str(row["answer"]))
            out_rows.append({"id": row_id, "proposition_text": qa_to_proposition(qa)})
        except KeyError as exc:
            error_rows.append({"id": row_id, "error": f"missing field {exc}"})
        except ConqaError as exc:
            error_rows.append({"id": row_id, "error": str(exc)})
    dataio.write_jsonl(args.out, out_rows)
    errors_path = args.errors or str(args.out) + ".errors.jsonl"
    dataio.write_jsonl(errors_path, error_rows)
    print(f"converted {len(out_rows)} rows, {len(error_rows)} rejected")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conqa",
        description="Implication-consistency tooling for binary question answering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset directory")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--worlds", type=int, default=50)
    p.add_argument("--attrs", type=int, default=12)
    p.add_argument("--queries-per-world", type=int, default=8)
    p.add_argument(
        "--match-relation-mix",
        action="store_true",
        help="draw relation kinds from the skewed target mix",
    )
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("train-toy", help="train the toy model on a dataset directory")
    p.add_argument("--data", required=True, help="dataset directory from generate")
    p.add_argument("--lambda", dest="weight", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch-pairs", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for metrics and predictions")
    p.set_defaults(func=_cmd_train_toy)

    p = sub.add_parser("sweep", help="train across consistency weights and seeds")
    p.add_argument("--data", required=True)
    p.add_argument("--lambdas", required=True, help="comma-separated weights")
    p.add_argument("--seeds", required=True, help="comma-separated seeds")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch-pairs", type=int, default=16)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("score", help="score a predictions file against relations")
    p.add_argument("--propositions", required=True)
    p.add_argument("--relations", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", help="optional path for the report as JSON")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("loss-eval", help="evaluate the consistency loss at one point")
    p.add_argument("--sufficient", type=float, required=True)
    p.add_argument("--necessary", type=float, required=True)
    p.add_argument("--lambda", dest="weight", type=float, default=1.0)
    p.set_defaults(func=_cmd_loss_eval)

    p = sub.add_parser("convert", help="rewrite question/answer rows as propositions")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--errors", help="sidecar for rejected rows (default: <out>.errors.jsonl)")
    p.set_defaults(func=_cmd_convert)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConqaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
