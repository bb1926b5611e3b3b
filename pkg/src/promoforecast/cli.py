"""Batch entry points for the full pipeline.

Every subcommand writes one JSON document to stdout; progress notes and
tables meant for people go to stderr, so output stays pipeable. Errors
from any layer exit nonzero with a message on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from datetime import date
from pathlib import Path

from .analytics import STAT_DIMS, normalized_stat_vectors, project_products
from .domain import ModelKind
from .ingest import (
    DatasetValidationError,
    SyntheticConfig,
    dataset_fingerprint,
    generate_synthetic,
    load_dataset,
    load_model,
    save_dataset,
    save_model,
)
from .models import (
    BoostingConfig,
    ForestConfig,
    GradientBoostingModel,
    LinearModel,
    MLPConfig,
    MLPModel,
    RandomForestModel,
    evaluate,
    train_model,
)
from .pipeline import (
    DEFAULT_HORIZON_CAP,
    ForecastContext,
    build_training_background,
    forecast,
    result_to_wire,
    split_chronological,
)
from .server import main as serve_main
from .whatif import promotion_to_wire, run_scenario, scenario_from_wire

log = logging.getLogger(__name__)

_CONFIG_CLASSES = {
    ModelKind.RANDOM_FOREST: ForestConfig,
    ModelKind.GRADIENT_BOOSTING: BoostingConfig,
    ModelKind.MLP: MLPConfig,
}


def _emit(doc: object) -> None:
    json.dump(doc, sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def _finite(value: float) -> float | None:
    return None if math.isnan(value) else value


def _context(args: argparse.Namespace) -> ForecastContext:
    return ForecastContext(load_dataset(args.data_dir))


def _background(context: ForecastContext, args: argparse.Namespace):
    return build_training_background(
        context, size=args.background_size, seed=args.seed
    )


# --- subcommands --------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    config = SyntheticConfig(
        n_products=args.n_products,
        n_days=args.n_days,
        base_demand=args.base_demand,
        price_elasticity=args.price_elasticity,
        promo_lift=args.promo_lift,
        season_amplitude=args.season_amplitude,
        noise_sd=args.noise_sd,
        seed=args.seed,
        campaign_rate=args.campaign_rate,
        price_jitter=args.price_jitter,
        start=args.start,
    )
    dataset = generate_synthetic(config).dataset()
    save_dataset(dataset, args.out, format=args.format)
    log.info("wrote %d products to %s", len(dataset.products), args.out)
    _emit(
        {
            "out": str(args.out),
            "products": len(dataset.products),
            "days_per_product": args.n_days,
            "promotions": len(dataset.promotions),
            "dataset_fingerprint": dataset_fingerprint(dataset),
        }
    )
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        dataset = load_dataset(args.data_dir)
    except DatasetValidationError as exc:
        _emit(
            {
                "ok": False,
                "violations": [
                    {"locator": v.locator, "rule": v.rule, "message": v.message}
                    for v in exc.report.violations
                ],
            }
        )
        log.error("dataset is invalid: %s", exc.report.summary())
        return 1
    _emit(
        {
            "ok": True,
            "violations": [],
            "products": len(dataset.products),
            "promotions": len(dataset.promotions),
            "dataset_fingerprint": dataset_fingerprint(dataset),
        }
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data_dir)
    context = ForecastContext(dataset)
    rows = context.training_rows()
    kind = ModelKind(args.model_kind)
    overrides = json.loads(args.config) if args.config else {}
    if not isinstance(overrides, dict):
        raise ValueError("--config must be a JSON object")
    overrides.setdefault("seed", args.seed)
    try:
        config = _CONFIG_CLASSES[kind](**overrides)
    except TypeError as exc:
        raise ValueError(f"bad config for {kind.value}: {exc}") from exc
    model = train_model(
        kind, rows.X, rows.y, config=config,
        layout_fingerprint=context.layout.fingerprint,
    )
    save_model(model, args.out)
    metrics = evaluate(rows.y, model.predict_many(rows.X))
    log.info("trained %s on %d rows, saved to %s", kind.value, len(rows), args.out)
    _emit(
        {
            "kind": kind.value,
            "rows": len(rows),
            "out": str(args.out),
            "layout_fingerprint": context.layout.fingerprint,
            "dataset_fingerprint": dataset_fingerprint(dataset),
            "train_metrics": metrics.as_dict(),
        }
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    context = _context(args)
    rows = context.training_rows()
    train_idx, test_idx = split_chronological(rows.dates, fraction=args.fraction)
    X_train, y_train = rows.X[train_idx], rows.y[train_idx]
    X_test, y_test = rows.X[test_idx], rows.y[test_idx]
    fp = context.layout.fingerprint
    seed = args.seed

    table = [
        ("Linear", "ordinary least squares",
         lambda: LinearModel.train(X_train, y_train, fp)),
        ("RandomForest", "100 bagged depth-8 trees",
         lambda: RandomForestModel.train(X_train, y_train, ForestConfig(seed=seed), fp)),
        ("XGBoost-style", "200 boosted depth-4 trees, shrinkage 0.1",
         lambda: GradientBoostingModel.train(X_train, y_train, BoostingConfig(seed=seed), fp)),
        ("MLP", "64x32 hidden units, 200 epochs",
         lambda: MLPModel.train(X_train, y_train, MLPConfig(seed=seed), fp)),
        ("GradientBoosting", "200 boosted stumps, shrinkage 0.1",
         lambda: GradientBoostingModel.train(
             X_train, y_train, BoostingConfig(max_depth=1, seed=seed), fp)),
    ]

    print(
        f"chronological split by date: {len(train_idx)} train rows / "
        f"{len(test_idx)} test rows (fraction {args.fraction:.2f})",
        file=sys.stderr,
    )
    print(
        "metrics describe this dataset only; not comparable to published benchmarks",
        file=sys.stderr,
    )
    print(f"{'model':<18} {'rmse':>10} {'mape':>9}", file=sys.stderr)

    out_rows = []
    for name, detail, fit in table:
        model = fit()
        metrics = evaluate(y_test, model.predict_many(X_test))
        mape = "n/a" if metrics.mape is None else f"{metrics.mape:.2f}%"
        print(f"{name:<18} {metrics.rmse:>10.2f} {mape:>9}", file=sys.stderr)
        out_rows.append(
            {"model": name, "detail": detail,
             "rmse": metrics.rmse, "mape": metrics.mape}
        )
    _emit(
        {
            "split": {
                "fraction": args.fraction,
                "train_rows": len(train_idx),
                "test_rows": len(test_idx),
            },
            "rows": out_rows,
        }
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    context = _context(args)
    model = load_model(args.model)
    result = forecast(
        context, args.product_id, model, args.start, args.end,
        _background(context, args), horizon_cap=args.horizon_cap,
    )
    doc = result_to_wire(result, list(context.layout.groups))
    doc["product_id"] = args.product_id
    _emit(doc)
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    context = _context(args)
    model = load_model(args.model)
    result = forecast(
        context, args.product_id, model, args.day, args.day,
        _background(context, args), horizon_cap=args.horizon_cap,
    )
    groups = list(context.layout.groups)
    phi = dict(zip(groups, result.attributions[0]))
    scale = sum(abs(v) for v in phi.values())
    _emit(
        {
            "product_id": args.product_id,
            "date": args.day.isoformat(),
            "prediction": result.predictions[0],
            "baseline": result.baseline,
            "phi": phi,
            "normalized_phi": {
                g: (v / scale if scale else 0.0) for g, v in phi.items()
            },
        }
    )
    return 0


def cmd_whatif(args: argparse.Namespace) -> int:
    if args.scenario == "-":
        payload = json.load(sys.stdin)
    else:
        with open(args.scenario) as fh:
            payload = json.load(fh)
    scenario = scenario_from_wire(payload)
    context = _context(args)
    model = load_model(args.model)
    run = run_scenario(
        context, scenario, model, _background(context, args),
        horizon_cap=args.horizon_cap,
    )
    comparison = run.comparison()
    groups = list(context.layout.groups)
    _emit(
        {
            "baseline": result_to_wire(run.baseline, groups),
            "scenario": result_to_wire(run.edited, groups),
            "comparison": {
                "deltas": list(comparison.deltas),
                "total_delta": comparison.total_delta,
                "growth_before": comparison.growth_before,
                "growth_after": comparison.growth_after,
            },
            "promotions_after": [promotion_to_wire(p) for p in run.promotions_after],
        }
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    context = _context(args)
    if args.product_id is not None:
        context.product(args.product_id)
        stats = context.stats.get(args.product_id)
        _emit(
            {
                "dims": list(STAT_DIMS),
                "products": [
                    {"id": args.product_id,
                     "stats": stats.as_dict() if stats else None}
                ],
            }
        )
        return 0
    _emit(
        {
            "dims": list(STAT_DIMS),
            "products": [
                {
                    "id": product.id,
                    "stats": (
                        context.stats[product.id].as_dict()
                        if product.id in context.stats else None
                    ),
                }
                for product in context.dataset.products
            ],
        }
    )
    return 0


def cmd_project(args: argparse.Namespace) -> int:
    context = _context(args)
    scored = [p.id for p in context.dataset.products if p.id in context.stats]
    if len(scored) < 2:
        raise ValueError(
            f"projection needs at least 2 products with stats, have {len(scored)}"
        )
    vectors = normalized_stat_vectors([context.stats[pid] for pid in scored])
    projection = project_products(
        vectors, seed=args.seed, perplexity=args.perplexity
    )
    _emit(
        {
            "method": projection.method,
            "seed": projection.seed,
            "kl_initial": _finite(projection.kl_initial),
            "kl_final": _finite(projection.kl_final),
            "products": [
                {"id": pid, "x": float(x), "y": float(y)}
                for pid, (x, y) in zip(scored, projection.coords)
            ],
        }
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    forwarded = ["--data-dir", str(args.data_dir)]
    for flag, value in (
        ("--host", args.host),
        ("--port", args.port),
        ("--horizon-cap", args.horizon_cap),
        ("--seed", args.seed),
    ):
        if value is not None:
            forwarded.extend([flag, str(value)])
    return serve_main(forwarded)


# --- parser -------------------------------------------------------------------


def _add_data_dir(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data-dir", required=True, type=Path,
        help="dataset directory or .json file",
    )


def _add_forecast_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, type=Path, help="saved model file")
    parser.add_argument("--background-size", type=int, default=64)
    parser.add_argument("--horizon-cap", type=int, default=DEFAULT_HORIZON_CAP)
    parser.add_argument("--seed", type=int, default=0,
                        help="background sampling seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promoforecast",
        description="Sales forecasting and promotion what-if analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--format", choices=["csv-dir", "json"], default=None,
                   help="inferred from the path when omitted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-products", type=int, default=20)
    p.add_argument("--n-days", type=int, default=400)
    p.add_argument("--base-demand", type=float, default=100.0)
    p.add_argument("--price-elasticity", type=float, default=-1.5)
    p.add_argument("--promo-lift", type=float, default=1.0)
    p.add_argument("--season-amplitude", type=float, default=0.2)
    p.add_argument("--noise-sd", type=float, default=5.0)
    p.add_argument("--campaign-rate", type=float, default=0.02)
    p.add_argument("--price-jitter", type=float, default=0.05)
    p.add_argument("--start", type=date.fromisoformat, default=date(2023, 1, 1))
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check a dataset against the domain rules")
    _add_data_dir(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("train", help="train one model on the full dataset")
    _add_data_dir(p)
    p.add_argument("--model-kind", required=True,
                   choices=[k.value for k in ModelKind])
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--config", default=None,
                   help="JSON object of config overrides")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "evaluate",
        help="score all five model rows on a chronological holdout",
    )
    _add_data_dir(p)
    p.add_argument("--fraction", type=float, default=0.8,
                   help="share of rows, by date, used for training")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="forecast a horizon with attributions")
    _add_data_dir(p)
    _add_forecast_flags(p)
    p.add_argument("--product-id", required=True)
    p.add_argument("--start", required=True, type=date.fromisoformat)
    p.add_argument("--end", required=True, type=date.fromisoformat)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", help="group attribution for a single day")
    _add_data_dir(p)
    _add_forecast_flags(p)
    p.add_argument("--product-id", required=True)
    p.add_argument("--day", required=True, type=date.fromisoformat)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("whatif", help="compare a scenario against the baseline")
    _add_data_dir(p)
    _add_forecast_flags(p)
    p.add_argument("--scenario", required=True,
                   help="scenario JSON file, or - for stdin")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("stats", help="six-number fingerprints per product")
    _add_data_dir(p)
    p.add_argument("--product-id", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("project", help="2-D embedding of product fingerprints")
    _add_data_dir(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_data_dir(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--horizon-cap", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
