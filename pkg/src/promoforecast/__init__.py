"""Sales forecasting and promotion what-if analysis for e-commerce catalogs."""

from .domain import (
    Dataset,
    FeatureVector,
    ForecastResult,
    ModelKind,
    Product,
    PromotionKind,
    PromotionRecord,
    SalesDay,
    SalesSeries,
    ValidationReport,
    Violation,
    validate_dataset,
)
from .promos import (
    LifecycleStatus,
    ParsedPromotion,
    RewardConversion,
    UnrecognizedPromotion,
    lifecycle_status,
    parse_promotion,
    promotion_strength,
    render_promotion,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FeatureVector",
    "ForecastResult",
    "LifecycleStatus",
    "ModelKind",
    "ParsedPromotion",
    "Product",
    "PromotionKind",
    "PromotionRecord",
    "RewardConversion",
    "SalesDay",
    "SalesSeries",
    "UnrecognizedPromotion",
    "ValidationReport",
    "Violation",
    "validate_dataset",
    "lifecycle_status",
    "parse_promotion",
    "promotion_strength",
    "render_promotion",
    "__version__",
]
