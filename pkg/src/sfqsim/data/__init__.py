"""Shipped netlists and pulse schedules (reconstruction data files)."""

from importlib import resources


def load_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def names() -> list[str]:
    root = resources.files(__package__)
    return sorted(
        entry.name
        for entry in root.iterdir()
        if entry.name.endswith((".cir", ".sched"))
    )
