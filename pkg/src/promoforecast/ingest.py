"""Dataset and model persistence.

Datasets live either in a directory of three CSVs (products.csv, sales.csv,
promotions.csv) or in a single JSON file; both forms round-trip field-exact.
Promotion numeric fields are never stored: they are re-derived by parsing
raw_text at load, so a file can never carry a rate that disagrees with its
own text. Models are stored in a self-describing versioned JSON container.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from datetime import date
from pathlib import Path
from typing import Iterable

from .domain import (
    Dataset,
    ModelKind,
    Product,
    PromotionRecord,
    SalesDay,
    SalesSeries,
    quantize_currency,
    validate_dataset,
)
from .promos import UnrecognizedPromotion, parse_promotion
from .synthetic import SyntheticConfig, SyntheticDataset, generate_synthetic

__all__ = [
    "DatasetParseError",
    "dataset_fingerprint",
    "DatasetValidationError",
    "ModelFormatError",
    "load_dataset",
    "save_dataset",
    "save_model",
    "load_model",
    "generate_synthetic",
    "SyntheticConfig",
    "MODEL_FORMAT",
    "MODEL_VERSION",
]

log = logging.getLogger(__name__)

MODEL_FORMAT = "promoforecast-model"
MODEL_VERSION = 1

DATASET_FORMAT = "promoforecast-dataset"
DATASET_VERSION = 1

PRODUCTS_HEADER = ["id", "title", "category", "brand", "store", "base_price"]
SALES_HEADER = ["product_id", "date", "units_sold", "price"]
PROMOTIONS_HEADER = ["id", "product_id", "raw_text", "start", "end", "enabled"]


class DatasetParseError(ValueError):
    """A malformed record, located by file and line."""

    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


class DatasetValidationError(ValueError):
    """Parsed cleanly but violates domain invariants."""

    def __init__(self, report):
        super().__init__(f"dataset invalid: {report.summary()}")
        self.report = report


class ModelFormatError(ValueError):
    """Corrupt or incompatible model file."""


# --- field parsers -----------------------------------------------------------


def _parse_date(raw: str, source: str, line: int, field: str) -> date:
    try:
        return date.fromisoformat(raw.strip())
    except ValueError:
        raise DatasetParseError(source, line, f"bad {field} {raw!r}: expected YYYY-MM-DD") from None


def _parse_float(raw: str, source: str, line: int, field: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise DatasetParseError(source, line, f"bad {field} {raw!r}: expected a number") from None


def _parse_int(raw: str, source: str, line: int, field: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise DatasetParseError(source, line, f"bad {field} {raw!r}: expected an integer") from None


def _parse_bool(raw: str, source: str, line: int, field: str) -> bool:
    text = raw.strip().lower()
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise DatasetParseError(source, line, f"bad {field} {raw!r}: expected true/false")


def _promotion_from_text(
    promo_id: str, product_id: str, raw_text: str, start: date, end: date, enabled: bool
) -> PromotionRecord | None:
    """Builds a record by parsing the text; unrecognized campaigns are
    skipped with a warning rather than silently zeroed."""
    try:
        parsed = parse_promotion(raw_text)
    except UnrecognizedPromotion as exc:
        log.warning("skipping promotion %s: %s", promo_id, exc)
        return None
    return PromotionRecord(
        id=promo_id,
        product_id=product_id,
        raw_text=raw_text,
        kind=parsed.kind,
        k_d=parsed.k_d,
        p_t=parsed.p_t,
        reward=parsed.reward,
        flash_hours=parsed.flash_hours,
        start=start,
        end=end,
        enabled=enabled,
    )


# --- CSV directory form ------------------------------------------------------


def _read_csv(path: Path, header: list[str]) -> Iterable[tuple[int, list[str]]]:
    if not path.exists():
        raise FileNotFoundError(f"missing {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or rows[0] != header:
        raise DatasetParseError(
            path.name, 1, f"expected header {','.join(header)}"
        )
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DatasetParseError(
                path.name, i, f"expected {len(header)} fields, got {len(row)}"
            )
        yield i, row


def _load_csv_dir(root: Path) -> tuple[list, list, list]:
    products = []
    for line, row in _read_csv(root / "products.csv", PRODUCTS_HEADER):
        pid, title, category, brand, store, base_price = row
        products.append(
            Product(
                id=pid, title=title, category=category, brand=brand, store=store,
                base_price=_parse_float(base_price, "products.csv", line, "base_price"),
            )
        )
    base_price_by_id = {p.id: p.base_price for p in products}

    days_by_product: dict[str, list[SalesDay]] = {}
    for line, row in _read_csv(root / "sales.csv", SALES_HEADER):
        pid, day_raw, units_raw, price_raw = row
        day = _parse_date(day_raw, "sales.csv", line, "date")
        units = _parse_int(units_raw, "sales.csv", line, "units_sold")
        if price_raw.strip():
            price = _parse_float(price_raw, "sales.csv", line, "price")
        else:
            # Price gaps inherit the previous day's price; a gap before any
            # observed price falls back to the product's base price.
            prior = days_by_product.get(pid)
            if prior:
                price = prior[-1].price
            else:
                price = base_price_by_id.get(pid, 0.0)
        days_by_product.setdefault(pid, []).append(
            SalesDay(date=day, units_sold=units, price=price)
        )
    sales = [
        SalesSeries(product_id=pid, days=tuple(days))
        for pid, days in days_by_product.items()
    ]

    promotions = []
    for line, row in _read_csv(root / "promotions.csv", PROMOTIONS_HEADER):
        promo_id, pid, raw_text, start_raw, end_raw, enabled_raw = row
        record = _promotion_from_text(
            promo_id, pid, raw_text,
            _parse_date(start_raw, "promotions.csv", line, "start"),
            _parse_date(end_raw, "promotions.csv", line, "end"),
            _parse_bool(enabled_raw, "promotions.csv", line, "enabled"),
        )
        if record is not None:
            promotions.append(record)
    return products, sales, promotions


def _save_csv_dir(dataset: Dataset, root: Path) -> None:
    root.mkdir(parents=True, exist_ok=True)
    with (root / "products.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PRODUCTS_HEADER)
        for p in dataset.products:
            writer.writerow([p.id, p.title, p.category, p.brand, p.store, f"{p.base_price:.2f}"])
    with (root / "sales.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SALES_HEADER)
        for series in dataset.sales:
            for day in series.days:
                writer.writerow(
                    [series.product_id, day.date.isoformat(), day.units_sold, f"{day.price:.2f}"]
                )
    with (root / "promotions.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROMOTIONS_HEADER)
        for promo in dataset.promotions:
            writer.writerow(
                [
                    promo.id, promo.product_id, promo.raw_text,
                    promo.start.isoformat(), promo.end.isoformat(),
                    "true" if promo.enabled else "false",
                ]
            )


# --- single-file JSON form ---------------------------------------------------


def _load_json_file(path: Path) -> tuple[list, list, list]:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetParseError(path.name, exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("format") != DATASET_FORMAT:
        raise DatasetParseError(path.name, 1, f"not a {DATASET_FORMAT} file")
    if doc.get("version") != DATASET_VERSION:
        raise DatasetParseError(
            path.name, 1,
            f"file version {doc.get('version')}, supported version {DATASET_VERSION}",
        )

    products = [Product(**entry) for entry in doc.get("products", [])]
    base_price_by_id = {p.id: p.base_price for p in products}

    sales = []
    for entry in doc.get("sales", []):
        days = []
        for day in entry["days"]:
            price = day.get("price")
            if price is None:
                price = days[-1].price if days else base_price_by_id.get(entry["product_id"], 0.0)
            days.append(
                SalesDay(
                    date=date.fromisoformat(day["date"]),
                    units_sold=int(day["units_sold"]),
                    price=float(price),
                )
            )
        sales.append(SalesSeries(product_id=entry["product_id"], days=tuple(days)))

    promotions = []
    for entry in doc.get("promotions", []):
        record = _promotion_from_text(
            entry["id"], entry["product_id"], entry["raw_text"],
            date.fromisoformat(entry["start"]), date.fromisoformat(entry["end"]),
            bool(entry.get("enabled", True)),
        )
        if record is not None:
            promotions.append(record)
    return products, sales, promotions


def _dataset_doc(dataset: Dataset) -> dict:
    return {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "products": [
            {
                "id": p.id, "title": p.title, "category": p.category,
                "brand": p.brand, "store": p.store, "base_price": p.base_price,
            }
            for p in dataset.products
        ],
        "sales": [
            {
                "product_id": s.product_id,
                "days": [
                    {"date": d.date.isoformat(), "units_sold": d.units_sold, "price": d.price}
                    for d in s.days
                ],
            }
            for s in dataset.sales
        ],
        "promotions": [
            {
                "id": p.id, "product_id": p.product_id, "raw_text": p.raw_text,
                "start": p.start.isoformat(), "end": p.end.isoformat(),
                "enabled": p.enabled,
            }
            for p in dataset.promotions
        ],
    }


def _save_json_file(dataset: Dataset, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_dataset_doc(dataset), indent=2))


def dataset_fingerprint(dataset: Dataset) -> str:
    """Short content hash of a dataset; models trained against one dataset
    are registered under it so they can never serve a different one."""
    canonical = json.dumps(_dataset_doc(dataset), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


# --- public API --------------------------------------------------------------


def load_dataset(path: str | Path, format: str | None = None) -> Dataset:
    """Load and validate a dataset.

    ``format`` is "csv-dir" or "json"; when omitted it is inferred from the
    path (directory vs .json file). Raises :class:`DatasetParseError` for
    malformed records and :class:`DatasetValidationError` when the parsed
    data violates domain invariants.
    """
    path = Path(path)
    if format is None:
        format = "csv-dir" if path.is_dir() else "json"
    if format == "csv-dir":
        products, sales, promotions = _load_csv_dir(path)
    elif format == "json":
        products, sales, promotions = _load_json_file(path)
    else:
        raise ValueError(f"unknown dataset format {format!r}")

    report = validate_dataset(products, sales, promotions)
    if not report.ok:
        raise DatasetValidationError(report)
    return Dataset(tuple(products), tuple(sales), tuple(promotions))


def save_dataset(dataset: Dataset, path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = "json" if path.suffix == ".json" else "csv-dir"
    if format == "csv-dir":
        _save_csv_dir(dataset, path)
    elif format == "json":
        _save_json_file(dataset, path)
    else:
        raise ValueError(f"unknown dataset format {format!r}")


# --- model container ---------------------------------------------------------

def _model_class(kind: ModelKind):
    from .models import GradientBoostingModel, MLPModel, RandomForestModel

    return {
        ModelKind.RANDOM_FOREST: RandomForestModel,
        ModelKind.GRADIENT_BOOSTING: GradientBoostingModel,
        ModelKind.MLP: MLPModel,
    }[kind]


def save_model(model, path: str | Path) -> None:
    """Write a trained model as a self-describing JSON container."""
    if not isinstance(model.kind, ModelKind):
        raise ModelFormatError(f"model kind {model.kind!r} cannot be persisted")
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind.value,
        "layout_fingerprint": model.layout_fingerprint,
        "payload": model.to_payload(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc))


def load_model(path: str | Path):
    """Load a model saved by :func:`save_model`.

    JSON serializes float64 losslessly, so tree models round-trip
    bit-for-bit and predictions are unchanged.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"corrupt model file {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path} is not a {MODEL_FORMAT} file")
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise ModelFormatError(
            f"{path} has format version {version}; this build supports version {MODEL_VERSION}"
        )
    try:
        kind = ModelKind(doc["kind"])
        payload = doc["payload"]
        fingerprint = doc["layout_fingerprint"]
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model file {path}: {exc}") from None
    return _model_class(kind).from_payload(payload, fingerprint)
