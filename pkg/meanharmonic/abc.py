from __future__ import annotations
from abc import ABC, abstractmethod


class Cacheable(ABC):
    """
    A computed result that can be written to and restored from a :class:`Cache`.
    """

    @property
    @abstractmethod
    def key(self) -> str:
        """
        canonical string naming the inputs the result was computed from
        """
        pass

    @abstractmethod
    def to_dict(self) -> dict:
        pass

    @classmethod
    @abstractmethod
    def from_dict(cls, data: dict) -> Cacheable:
        pass

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.key)
