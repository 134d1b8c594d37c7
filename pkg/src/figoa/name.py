"""Hierarchical content names."""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import quote, unquote_to_bytes


@dataclass(frozen=True, order=True)
class Name:
    components: tuple[bytes, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(bytes(c) for c in self.components))
        if not self.components:
            raise ValueError("a name needs at least one component")
        if any(len(c) == 0 for c in self.components):
            raise ValueError("name components must be non-empty")

    @classmethod
    def from_uri(cls, uri: str) -> Name:
        """Parse ``/ndn/usa/cnn``; components are percent-decoded."""
        parts = [p for p in uri.strip().split("/") if p]
        return cls(tuple(unquote_to_bytes(p) for p in parts))

    def to_uri(self) -> str:
        return "/" + "/".join(quote(c, safe="-._~") for c in self.components)

    __str__ = to_uri

    def __len__(self):
        return len(self.components)

    def is_prefix_of(self, other: Name) -> bool:
        return len(self) <= len(other) and other.components[: len(self)] == self.components

    def append(self, component: bytes | str) -> Name:
        if isinstance(component, str):
            component = component.encode()
        return Name(self.components + (component,))
