"""Feature registry: the ordered feature inventory and its group layout.

The registry is derived from a :class:`~textcontours.resources.ResourceStore`
and an optional INI config, because large parts of the inventory (lexicon
subcategories, norm tables, n-gram registers) exist only relative to the
resources the user supplies. Group sizes are reported against the
canonical targets 19 / 77 / 14 / 326; with synthetic test resources the
realized counts are smaller, which is expected and surfaced in
:meth:`FeatureRegistry.group_report`.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass

from .morphsyn import MORPHSYN_FEATURES
from .readability import READABILITY_FEATURES
from .resources import ResourceStore

GROUPS = ("morphsyn", "lexical", "readability", "sentiemo")
GROUP_TARGETS = {"morphsyn": 19, "lexical": 77, "readability": 14, "sentiemo": 326}

_STATIC_LEXICAL = (
    "lexical_density",
    "noun_ratio",
    "verb_ratio",
    "adjective_ratio",
    "adverb_ratio",
    "function_word_ratio",
    "mean_word_length_chars",
    "mean_word_syllables",
    "ttr_sentence",
    "cttr_cumulative",
    "rttr_cumulative",
    "herdan_c",
    "mattr_50",
    "hapax_proportion",
)


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class RegistryConfig:
    """Parsed registry INI options."""

    enabled_groups: tuple[str, ...] = GROUPS
    sophistication_wordlists: tuple[str, ...] | None = None  # None = all unbound
    norms: tuple[str, ...] | None = None  # None = all
    lexicons: tuple[str, ...] | None = None  # None = all
    dale_chall_list: str | None = "dale_chall"
    spache_list: str | None = "spache"
    mattr_window: int = 50


def _split_csv(raw: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in raw.split(",") if x.strip())


def load_registry_config(path: str | None) -> RegistryConfig:
    """Read the INI registry config; missing path yields all defaults."""
    if path is None:
        return RegistryConfig()
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise RegistryError(f"registry config not found: {path}")
    kwargs = {}
    if parser.has_section("groups"):
        enabled = tuple(g for g in GROUPS if parser.getboolean("groups", g, fallback=True))
        if not enabled:
            raise RegistryError("registry config disables every feature group")
        kwargs["enabled_groups"] = enabled
    if parser.has_option("lexical", "wordlists"):
        kwargs["sophistication_wordlists"] = _split_csv(parser.get("lexical", "wordlists"))
    if parser.has_option("lexical", "norms"):
        kwargs["norms"] = _split_csv(parser.get("lexical", "norms"))
    if parser.has_option("lexical", "mattr_window"):
        kwargs["mattr_window"] = parser.getint("lexical", "mattr_window")
    if parser.has_option("sentiemo", "lexicons"):
        kwargs["lexicons"] = _split_csv(parser.get("sentiemo", "lexicons"))
    if parser.has_option("readability", "dale_chall_list"):
        key = parser.get("readability", "dale_chall_list").strip()
        kwargs["dale_chall_list"] = key or None
    if parser.has_option("readability", "spache_list"):
        key = parser.get("readability", "spache_list").strip()
        kwargs["spache_list"] = key or None
    return RegistryConfig(**kwargs)


@dataclass(frozen=True)
class FeatureRegistry:
    """Ordered (name, group) inventory defining the contour vector layout.

    ``config`` is present when the registry was built from a store; a
    registry reloaded from its JSON sidecar carries no config (it is not
    needed downstream of extraction).
    """

    features: tuple[tuple[str, str], ...]
    config: RegistryConfig | None = None

    def __post_init__(self):
        names = [n for n, _ in self.features]
        if len(names) != len(set(names)):
            raise RegistryError("duplicate feature names in registry")

    @property
    def dimension(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.features)

    def group_columns(self, group: str) -> list[int]:
        return [i for i, (_, g) in enumerate(self.features) if g == group]

    def group_counts(self) -> dict[str, int]:
        counts = {g: 0 for g in GROUPS}
        for _, g in self.features:
            counts[g] += 1
        return counts

    def group_report(self) -> dict[str, dict[str, int]]:
        counts = self.group_counts()
        return {g: {"count": counts[g], "target": GROUP_TARGETS[g]} for g in GROUPS}

    def content_hash(self) -> str:
        payload = "\n".join(f"{n}\t{g}" for n, g in self.features)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_json(self) -> dict:
        return {
            "features": [{"name": n, "group": g} for n, g in self.features],
            "groups": self.group_report(),
            "hash": self.content_hash(),
        }

    def write_sidecar(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def sophistication_lists(store: ResourceStore, cfg: RegistryConfig) -> tuple[str, ...]:
    if cfg.sophistication_wordlists is not None:
        return cfg.sophistication_wordlists
    reserved = {cfg.dale_chall_list, cfg.spache_list}
    return tuple(name for name in sorted(store.wordlists) if name not in reserved)


def norm_names(store: ResourceStore, cfg: RegistryConfig) -> tuple[str, ...]:
    if cfg.norms is not None:
        return cfg.norms
    return tuple(t.name for t in store.norms)


def lexicon_names(store: ResourceStore, cfg: RegistryConfig) -> tuple[str, ...]:
    if cfg.lexicons is not None:
        return cfg.lexicons
    return tuple(lx.name for lx in store.lexicons)


def build_registry(store: ResourceStore, cfg: RegistryConfig | None = None) -> FeatureRegistry:
    """Assemble the feature inventory for a store under a config.

    Order is fixed given (store, config): morphsyn, lexical, readability,
    sentiemo; within resource-driven blocks, resources appear in store
    order and subcategories in lexicon declaration order.
    """
    cfg = cfg or RegistryConfig()
    feats: list[tuple[str, str]] = []
    if "morphsyn" in cfg.enabled_groups:
        feats += [(n, "morphsyn") for n in MORPHSYN_FEATURES]
    if "lexical" in cfg.enabled_groups:
        feats += [(n, "lexical") for n in _STATIC_LEXICAL]
        for name in sophistication_lists(store, cfg):
            store.wordlist(name)  # existence check
            feats.append((f"advanced_word_prop_{name}", "lexical"))
        for name in norm_names(store, cfg):
            store.norm(name)
            feats.append((f"norm_{name}_mean", "lexical"))
            feats.append((f"norm_{name}_coverage", "lexical"))
        for table in store.freq_tables:
            feats.append((f"freq_{table.register}_{table.n}_logf", "lexical"))
            feats.append((f"freq_{table.register}_{table.n}_attested", "lexical"))
    if "readability" in cfg.enabled_groups:
        feats += [(n, "readability") for n in READABILITY_FEATURES]
    if "sentiemo" in cfg.enabled_groups:
        wanted = set(lexicon_names(store, cfg))
        for lx in store.lexicons:
            if lx.name not in wanted:
                continue
            for sub in lx.subcategories:
                feats.append((f"{lx.name}_{sub}", "sentiemo"))
            feats.append((f"{lx.name}_coverage", "sentiemo"))
    if not feats:
        raise RegistryError("registry is empty; enable at least one group")
    return FeatureRegistry(features=tuple(feats), config=cfg)
