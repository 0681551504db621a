"""Frequent itemset hiding: sanitization algorithms, evaluation metrics and an experiment harness."""

from .borders import (
    BorderSet,
    SensitiveSet,
    compute_borders,
    expand_sensitive,
    negative_border,
    positive_border,
    revised_frequent,
)
from .dataset import (
    DatasetError,
    DatasetStats,
    Transaction,
    TransactionDatabase,
    db_stats,
    parse_database,
    parse_itemset_file,
    write_database,
)
from .miner import FrequentSet, mine_frequent, resolve_sigma, support, support_map

__version__ = "0.1.0"

__all__ = [
    "BorderSet",
    "SensitiveSet",
    "compute_borders",
    "expand_sensitive",
    "negative_border",
    "positive_border",
    "revised_frequent",
    "DatasetError",
    "DatasetStats",
    "FrequentSet",
    "Transaction",
    "TransactionDatabase",
    "db_stats",
    "mine_frequent",
    "parse_database",
    "parse_itemset_file",
    "resolve_sigma",
    "support",
    "support_map",
    "write_database",
]
