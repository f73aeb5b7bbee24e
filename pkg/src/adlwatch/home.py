"""Default smart-home model: monitored repositories, tagged items, the shared
event vocabulary, and the mapping from event kinds to action facts."""
from __future__ import annotations

from dataclasses import dataclass, field

ACTIVITIES = ("ConsumeMeal", "PrepareMeal", "TakeMedicines")

# repositories carry a magnetic door sensor; RFID-equipped ones also a reader
REPOSITORIES = {
    "fridge": "Fridge",
    "medCabinet": "MedCabinet",
    "foodCabinet": "FoodCabinet",
    "panCabinet": "PanCabinet",
    "silverwareDrawer": "SilverwareDrawer",
}
RFID_REPOSITORIES = ("fridge", "medCabinet", "foodCabinet", "panCabinet")


def _default_tags():
    return {
        1: "milk",
        2: "bread",
        3: "pasta",
        4: "aspirin",
        5: "vitaminD",
        6: "ibuprofen",
        7: "pan",
        8: "juice",
    }


def _default_categories():
    return {
        "medicine": frozenset({"aspirin", "vitaminD", "ibuprofen"}),
        "food": frozenset({"milk", "bread", "pasta", "juice"}),
        "refFood": frozenset({"milk", "juice"}),
        "cookFood": frozenset({"pasta"}),
        "nonRefStorage": frozenset({"foodCabinet"}),
        "medCabinet": frozenset({"medCabinet"}),
        "cookingPan": frozenset({"pan"}),
        "silverwareDrawer": frozenset({"silverwareDrawer"}),
        "repository": frozenset(REPOSITORIES),
    }


@dataclass(frozen=True)
class HomeModel:
    """Object catalog shared by the scenario generator and the fact extractor."""

    tags: dict[int, str] = field(default_factory=_default_tags)
    categories: dict[str, frozenset[str]] = field(default_factory=_default_categories)

    def item_for_tag(self, tag: int) -> str:
        return self.tags[int(tag)]

    def tag_for_item(self, item: str) -> int:
        for tag, name in self.tags.items():
            if name == item:
                return tag
        raise KeyError(item)

    def in_category(self, category: str, obj: str) -> bool:
        return obj in self.categories.get(category, ())


def event_vocabulary() -> frozenset[str]:
    kinds = set()
    for repo, label in REPOSITORIES.items():
        kinds.add(f"Open{label}")
        kinds.add(f"Close{label}")
        if repo in RFID_REPOSITORIES:
            kinds.add(f"RetrieveFrom{label}")
            kinds.add(f"ReturnTo{label}")
    kinds.update({"StoveOn", "StoveOff", "SitKitchenChair", "StandKitchenChair",
                  "PresenceKitchenTable"})
    return frozenset(kinds)


# kind -> (verb, fixed object or None-for-tagged-item, container)
def kind_action_map() -> dict[str, tuple[str, str | None, str]]:
    out = {}
    for repo, label in REPOSITORIES.items():
        out[f"Open{label}"] = ("open", "door", repo)
        out[f"Close{label}"] = ("close", "door", repo)
        if repo in RFID_REPOSITORIES:
            out[f"RetrieveFrom{label}"] = ("retrieve", None, repo)
            out[f"ReturnTo{label}"] = ("return", None, repo)
    out["SitKitchenChair"] = ("sit", "chair", "kitchen")
    out["StandKitchenChair"] = ("stand", "chair", "kitchen")
    return out


def sensor_for_kind(kind: str) -> str:
    """Deterministic sensor id for a synthetic event kind."""
    for repo, label in REPOSITORIES.items():
        if kind in (f"Open{label}", f"Close{label}"):
            return f"mag_{repo}"
        if kind in (f"RetrieveFrom{label}", f"ReturnTo{label}"):
            return f"rfid_{repo}"
    return {
        "StoveOn": "temp_stove",
        "StoveOff": "temp_stove",
        "SitKitchenChair": "pressure_chair",
        "StandKitchenChair": "pressure_chair",
        "PresenceKitchenTable": "presence_table",
    }[kind]
