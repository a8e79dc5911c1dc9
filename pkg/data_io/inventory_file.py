"""
Fichier texte de l'inventaire de sécurité (base hors ligne de
l'application de vérification).

Une ligne par primitive:

    <nom de la primitive>\\t<sûre jusqu'au (ISO-8601)>\\t<mise à jour le (ISO-8601)>

Les lignes vides et celles commençant par ``#`` sont ignorées.
"""

import logging
from typing import List

from core.security_inventory import InventoryEntry, Primitive, SecurityInventory
from models.errors import MopsError, RecordFormatError
from models.time_instant import TimeInstant

logger = logging.getLogger(__name__)

INVENTORY_HEADER = "# primitive\tsecure-until\tlast-updated"


def format_inventory(inv: SecurityInventory) -> str:
    lines = [INVENTORY_HEADER]
    for entry in inv.entries:
        lines.append(f"{entry.primitive.name}\t{entry.secure_until.to_iso()}\t{entry.last_updated.to_iso()}")
    return "\n".join(lines) + "\n"


def parse_inventory(text: str) -> SecurityInventory:
    """
    Analyse le contenu d'un fichier d'inventaire.

    Raises:
        RecordFormatError: Ligne mal formée (position = numéro de ligne)
        UnknownPrimitive: Primitive inconnue ou inventaire incomplet
    """
    entries: List[InventoryEntry] = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise RecordFormatError(f"Ligne d'inventaire mal formée: {line!r}",
                                    section="Inventory", position=f"ligne {number}")
        name, until, updated = fields
        try:
            entries.append(InventoryEntry(Primitive.parse(name), TimeInstant.parse(until),
                                          TimeInstant.parse(updated)))
        except MopsError:
            raise
        except ValueError as exc:
            raise RecordFormatError(f"Date invalide: {exc}", section="Inventory",
                                    position=f"ligne {number}") from exc
    return SecurityInventory(entries)


def save_inventory(inv: SecurityInventory, path: str) -> str:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_inventory(inv))
    logger.info("Inventaire écrit: %s", path)
    return path


def load_inventory(path: str) -> SecurityInventory:
    with open(path, "r", encoding="utf-8") as f:
        inv = parse_inventory(f.read())
    logger.info("Inventaire chargé: %s (%d entrées)", path, len(inv.entries))
    return inv
