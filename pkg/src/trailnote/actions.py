"""Action taxonomy: the canonical vocabulary of loggable user interactions.

The taxonomy ships as a versioned text file (``data/actions.txt``) so the
predictor-set assignments stay editable configuration. Loading asserts the
structural contract: 55 unique tokens, group sizes 12/22/14/7, 48 members of
the personality predictor set and 35 of the characterization set.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

from .errors import ConfigError, UnknownActionError

GROUPS = ("data-exploration", "note-exploration", "edit", "other")
_GROUP_SIZES = {"data-exploration": 12, "note-exploration": 22, "edit": 14, "other": 7}
_KNOWN_FLAGS = {"personality", "characterization", "hover"}
_TOTAL = 55
_PERSONALITY = 48
_CHARACTERIZATION = 35

# Trail normalization treats deselecting a country as the same exploration
# intent as selecting one. Applied by the pattern miner only; raw logs keep
# both tokens.
SELECT_COUNTRY = "select_country"
DESELECT_COUNTRY = "deselect_country"
SAVE_NOTE = "save_note"
UPDATE_NOTE = "update_note"
DEACTIVATE_WINDOW = "deactivate_window"
ACTIVATE_WINDOW = "activate_window"


@dataclass(frozen=True)
class ActionType:
    """One canonical interaction type."""

    id: str
    group: str
    predictor_flags: frozenset[str]

    @property
    def is_hover(self) -> bool:
        return "hover" in self.predictor_flags

    @property
    def characterization(self) -> bool:
        return "characterization" in self.predictor_flags


class ActionTaxonomy:
    """Immutable lookup over the canonical action list, in file order."""

    def __init__(self, version: int, actions: Iterable[ActionType]):
        self.version = version
        self.actions: tuple[ActionType, ...] = tuple(actions)
        self._by_id: Mapping[str, ActionType] = {a.id: a for a in self.actions}
        self._validate()

    def _validate(self) -> None:
        if len(self._by_id) != len(self.actions):
            raise ConfigError("taxonomy tokens are not unique")
        if len(self.actions) != _TOTAL:
            raise ConfigError(f"taxonomy must define {_TOTAL} actions, got {len(self.actions)}")
        for group, size in _GROUP_SIZES.items():
            got = sum(1 for a in self.actions if a.group == group)
            if got != size:
                raise ConfigError(f"group {group!r} must have {size} actions, got {got}")
        pers = sum(1 for a in self.actions if "personality" in a.predictor_flags)
        char = sum(1 for a in self.actions if a.characterization)
        if pers != _PERSONALITY:
            raise ConfigError(f"personality set must have {_PERSONALITY} members, got {pers}")
        if char != _CHARACTERIZATION:
            raise ConfigError(
                f"characterization set must have {_CHARACTERIZATION} members, got {char}"
            )
        bad = [a.id for a in self.actions if a.characterization and "personality" not in a.predictor_flags]
        if bad:
            raise ConfigError(f"characterization members missing from personality set: {bad}")

    def __contains__(self, token: str) -> bool:
        return token in self._by_id

    def __iter__(self):
        return iter(self.actions)

    def get(self, token: str) -> ActionType:
        try:
            return self._by_id[token]
        except KeyError:
            raise UnknownActionError(token) from None

    def tokens(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.actions)

    def group_of(self, token: str) -> str:
        return self.get(token).group

    def characterization_tokens(self) -> tuple[str, ...]:
        """The 35 note-characterization predictors, in taxonomy order."""
        return tuple(a.id for a in self.actions if a.characterization)

    def hover_tokens(self) -> frozenset[str]:
        return frozenset(a.id for a in self.actions if a.is_hover)

    def checksum(self) -> str:
        """SHA-256 over the canonical serialization; shared with clients."""
        lines = [f"version={self.version}"]
        for a in sorted(self.actions, key=lambda a: a.id):
            lines.append(f"{a.id}|{a.group}|{','.join(sorted(a.predictor_flags))}")
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def parse_taxonomy(text: str) -> ActionTaxonomy:
    version: int | None = None
    actions: list[ActionType] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key == "version":
            version = int(value.strip())
        elif key == "action":
            parts = [p.strip() for p in value.split("|")]
            if len(parts) != 3:
                raise ConfigError(f"bad action entry: {raw!r}")
            token, group, flags_s = parts
            if group not in GROUPS:
                raise ConfigError(f"unknown group {group!r} for action {token!r}")
            flags = frozenset(f.strip() for f in flags_s.split(",") if f.strip())
            unknown = flags - _KNOWN_FLAGS
            if unknown:
                raise ConfigError(f"unknown flags {sorted(unknown)} for action {token!r}")
            actions.append(ActionType(id=token, group=group, predictor_flags=flags))
        else:
            raise ConfigError(f"unknown taxonomy key {key!r}")
    if version is None:
        raise ConfigError("taxonomy file missing a version entry")
    return ActionTaxonomy(version, actions)


def load_taxonomy(path: str | None = None) -> ActionTaxonomy:
    """Load the packaged taxonomy, or an override file."""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return parse_taxonomy(fh.read())
    text = resources.files("trailnote.data").joinpath("actions.txt").read_text("utf-8")
    return parse_taxonomy(text)


_DEFAULT: ActionTaxonomy | None = None


def default_taxonomy() -> ActionTaxonomy:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_taxonomy()
    return _DEFAULT


def canonical_action(token: str, taxonomy: ActionTaxonomy | None = None) -> ActionType:
    """Map a raw token to its canonical ActionType; unknown tokens raise."""
    return (taxonomy or default_taxonomy()).get(token)
