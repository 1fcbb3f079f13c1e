"""Pipeline stages and the registry of pass descriptors."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum


class Stage(str, Enum):
    INITIALIZATION = "initialization"
    LAYOUT = "layout"
    ROUTING = "routing"
    TRANSLATION = "translation"
    OPTIMIZATION = "optimization"
    SCHEDULING = "scheduling"

    @property
    def index(self) -> int:
        return STAGE_ORDER.index(self)

    def __str__(self) -> str:
        return self.value


STAGE_ORDER = tuple(Stage)


class UnknownPassError(KeyError):
    pass


@dataclass(frozen=True)
class PassDescriptor:
    name: str
    kind: str  # "analysis" | "transformation"
    module: str
    declared_stages: frozenset[Stage] = frozenset()

    def __post_init__(self):
        if not self.module:
            raise ValueError(f"pass {self.name}: module must be nonempty")
        if self.kind not in ("analysis", "transformation"):
            raise ValueError(f"pass {self.name}: kind must be analysis or transformation")


_REGISTRY: dict[str, PassDescriptor] = {}


def register(descriptor: PassDescriptor) -> PassDescriptor:
    """Add ``descriptor``; re-registering the same name must agree on kind and module."""
    old = _REGISTRY.get(descriptor.name)
    if old is not None:
        if (old.kind, old.module) != (descriptor.kind, descriptor.module):
            raise ValueError(f"pass name {descriptor.name!r} already registered with a different module/kind")
        descriptor = replace(old, declared_stages=old.declared_stages | descriptor.declared_stages)
    _REGISTRY[descriptor.name] = descriptor
    return descriptor


def amend_stage(name: str, stage: Stage) -> PassDescriptor:
    desc = lookup(name)
    if stage not in desc.declared_stages:
        desc = replace(desc, declared_stages=desc.declared_stages | {stage})
        _REGISTRY[name] = desc
    return desc


def lookup(name: str) -> PassDescriptor:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownPassError(f"unregistered pass {name!r}") from None


def is_registered(name: str) -> bool:
    return name in _REGISTRY


def registered_names() -> list[str]:
    return sorted(_REGISTRY)
