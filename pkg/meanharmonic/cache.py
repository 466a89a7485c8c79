from __future__ import annotations

from collections.abc import Callable
from typing import TypeVar
import json
import os.path
import logging

from .abc import Cacheable
from .errors import CacheOutdated

log = logging.getLogger(__name__)

T = TypeVar("T", bound=Cacheable)


class Cache:
    """
    Keeps computed moment tables and kernel bases in memory and, if a directory is given, as JSON files on disk.

    :param cache_dir: directory to store results in (None to keep results in memory only)
    :param version: results written by another version of this library are recomputed
    """

    def __init__(self, cache_dir: str | None = None, version: str | None = None):
        assert isinstance(cache_dir, (str | None))
        if version is None:
            from . import __version__ as version
        self._cache_dir: str | None = cache_dir
        self._version: str = version
        self._by_key: dict[str, Cacheable] = {}

    @property
    def cache_dir(self) -> str | None:
        return self._cache_dir

    def _path(self, key: str) -> str:
        return os.path.join(self._cache_dir, key.replace("/", "_").replace(":", "-") + ".json")

    def get(self, key: str, cls: type[T], compute: Callable[[], T]) -> T:
        """
        :param key: canonical key of the requested result
        :param cls: type used to restore stored data
        :param compute: called when the result is neither in memory nor on disk
        """
        if key in self._by_key:
            return self._by_key[key]

        element = None
        if self._cache_dir is not None:
            try:
                with open(self._path(key), "r") as in_file:
                    data = json.load(in_file)
                if data.get("version") != self._version or data.get("key") != key:
                    raise CacheOutdated()
                element = cls.from_dict(data["result"])
                log.debug("loaded %s from cache", key)
            except (FileNotFoundError, json.JSONDecodeError):
                pass
            except (KeyError, CacheOutdated):
                # maybe cache is outdated
                log.debug("discarding outdated cache entry %s", key)

        if element is None:
            element = compute()
            if self._cache_dir is not None:
                os.makedirs(self._cache_dir, exist_ok=True)
                with open(self._path(key), "w") as out_file:
                    json.dump({"key": key, "version": self._version, "result": element.to_dict()}, out_file)
                    log.debug("computed and cached %s", key)

        self._by_key[key] = element
        return element

    def clear(self):
        self._by_key.clear()
