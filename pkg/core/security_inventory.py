"""
Inventaire de sécurité des primitives cryptographiques.

Pour chaque fonction de hachage, chaque schéma de signature et chaque
longueur de clé supportés, l'inventaire indique jusqu'à quand la primitive
est estimée sûre. Les intervalles sont semi-ouverts: une primitive est sûre
sur [début, secure_until) et ne l'est plus à ``secure_until``.

Les mises à jour ne peuvent qu'avancer ces dates: une attaque raccourcit la
durée de vie prévue, elle ne la prolonge jamais.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Optional, Tuple, Union

from models.attestation import Attestation
from models.certificate import Certificate
from models.errors import LifetimeExtension, UnknownPrimitive
from models.primitives import ALL_SIGNATURE_PARAMS, SIGNATURE_SCHEME, HashFunctionId, SignatureParams
from models.time_instant import TimeInstant

logger = logging.getLogger(__name__)

# Dates de fin de sécurité (prévisions de Lenstra)
SHA256_SECURE_UNTIL = TimeInstant.from_date(2038)
SHA384_SECURE_UNTIL = TimeInstant.from_date(2084)
# Au-delà de l'horizon de simulation (100 ans à partir de 2016)
HORIZON_SENTINEL = TimeInstant.from_date(2130)

INVENTORY_PUBLISHED = TimeInstant.from_date(2016)

KIND_HASH = "hash"
KIND_SCHEME = "scheme"
KIND_KEY = "key"


@dataclass(frozen=True, order=True)
class Primitive:
    """
    Primitive inventoriée.

    Attributes:
        kind (str): ``hash``, ``scheme`` (schéma de signature) ou ``key``
            (schéma + longueur de clé)
        name (str): Nom canonique (``SHA-256``, ``SIM-RSA``, ``SIM-RSA-2048``)
    """

    kind: str
    name: str

    @staticmethod
    def for_hash(hash_fn: HashFunctionId) -> "Primitive":
        return Primitive(KIND_HASH, hash_fn.value)

    @staticmethod
    def for_key(params: SignatureParams) -> "Primitive":
        return Primitive(KIND_KEY, params.name)

    @staticmethod
    def for_scheme(scheme: str = SIGNATURE_SCHEME) -> "Primitive":
        return Primitive(KIND_SCHEME, scheme)

    @staticmethod
    def parse(name: str) -> "Primitive":
        """
        Déduit la primitive de son nom canonique.

        Raises:
            UnknownPrimitive: Si le nom ne correspond à aucune primitive
        """
        if name == SIGNATURE_SCHEME:
            return Primitive.for_scheme()
        if name.startswith(SIGNATURE_SCHEME + "-"):
            return Primitive.for_key(SignatureParams.parse(name))
        return Primitive.for_hash(HashFunctionId.parse(name))

    def __str__(self) -> str:
        return self.name


PrimitiveLike = Union[Primitive, HashFunctionId, SignatureParams, str]


def as_primitive(value: PrimitiveLike) -> Primitive:
    if isinstance(value, Primitive):
        return value
    if isinstance(value, HashFunctionId):
        return Primitive.for_hash(value)
    if isinstance(value, SignatureParams):
        return Primitive.for_key(value)
    if isinstance(value, str):
        return Primitive.parse(value)
    raise UnknownPrimitive(f"Primitive inconnue: {value!r}")


@dataclass(frozen=True)
class InventoryEntry:
    """
    Entrée de l'inventaire.

    Attributes:
        primitive (Primitive): Primitive concernée
        secure_until (TimeInstant): Première date où la primitive n'est plus sûre
        last_updated (TimeInstant): Date de la dernière mise à jour
    """

    primitive: Primitive
    secure_until: TimeInstant
    last_updated: TimeInstant


def required_primitives() -> Tuple[Primitive, ...]:
    """Primitives devant figurer dans tout inventaire."""
    return (
        tuple(Primitive.for_hash(h) for h in HashFunctionId)
        + (Primitive.for_scheme(),)
        + tuple(Primitive.for_key(p) for p in ALL_SIGNATURE_PARAMS)
    )


class SecurityInventory:
    """
    Inventaire immuable: chaque mise à jour renvoie un nouvel inventaire.

    Attributes:
        entries (Dict[Primitive, InventoryEntry]): Entrées par primitive
    """

    def __init__(self, entries: Iterable[InventoryEntry]):
        table: Dict[Primitive, InventoryEntry] = {}
        for entry in entries:
            if entry.primitive in table:
                raise ValueError(f"Entrée dupliquée pour {entry.primitive}")
            table[entry.primitive] = entry
        missing = [p.name for p in required_primitives() if p not in table]
        if missing:
            raise UnknownPrimitive(f"Inventaire incomplet, manquant: {', '.join(missing)}")
        self._entries = table

    @property
    def entries(self) -> Tuple[InventoryEntry, ...]:
        return tuple(self._entries[p] for p in sorted(self._entries))

    def entry(self, primitive: PrimitiveLike) -> InventoryEntry:
        """
        Raises:
            UnknownPrimitive: Si la primitive n'est pas inventoriée
        """
        key = as_primitive(primitive)
        try:
            return self._entries[key]
        except KeyError:
            raise UnknownPrimitive(f"Primitive absente de l'inventaire: {key}") from None

    def secure_until(self, primitive: PrimitiveLike) -> TimeInstant:
        return self.entry(primitive).secure_until

    def secure_at(self, primitive: PrimitiveLike, at: TimeInstant) -> bool:
        return at < self.entry(primitive).secure_until

    def signature_secure_at(self, params: SignatureParams, at: TimeInstant) -> bool:
        """Schéma et longueur de clé tous deux sûrs à ``at``."""
        return (self.secure_at(Primitive.for_scheme(params.scheme), at)
                and self.secure_at(params, at))

    def with_entry(self, entry: InventoryEntry) -> "SecurityInventory":
        table = dict(self._entries)
        table[entry.primitive] = entry
        return SecurityInventory(table.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, SecurityInventory) and self._entries == other._entries

    def __repr__(self) -> str:
        return f"SecurityInventory({len(self._entries)} entrées)"

    def print_table(self):
        """Affiche l'inventaire."""
        print(f"\n{'='*60}")
        print("INVENTAIRE DE SÉCURITÉ")
        print(f"{'='*60}")
        for entry in self.entries:
            print(f"  {entry.primitive.name:<15} sûr jusqu'au {entry.secure_until.to_iso()} "
                  f"(mis à jour le {entry.last_updated.to_iso()})")
        print(f"{'='*60}\n")


def secure_at(inv: SecurityInventory, primitive: PrimitiveLike, at: TimeInstant) -> bool:
    """
    Indique si une primitive est sûre à une date.

    Raises:
        UnknownPrimitive: Si la primitive est inconnue
    """
    return inv.secure_at(primitive, at)


def default_lenstra_inventory(published: TimeInstant = INVENTORY_PUBLISHED) -> SecurityInventory:
    """
    Inventaire par défaut: SHA-256 et RSA 2048 jusqu'en 2038, SHA-384 et
    RSA 4096 jusqu'en 2084, SHA-512 et RSA 8192 au-delà de l'horizon.
    """
    dates = {
        HashFunctionId.SHA256: SHA256_SECURE_UNTIL,
        HashFunctionId.SHA384: SHA384_SECURE_UNTIL,
        HashFunctionId.SHA512: HORIZON_SENTINEL,
    }
    entries = [InventoryEntry(Primitive.for_hash(h), until, published) for h, until in dates.items()]
    entries.extend(
        InventoryEntry(Primitive.for_key(SignatureParams.for_hash(h)), until, published)
        for h, until in dates.items()
    )
    entries.append(InventoryEntry(Primitive.for_scheme(), HORIZON_SENTINEL, published))
    return SecurityInventory(entries)


def validity_estimate(inv: SecurityInventory, latest_attestation: Attestation,
                      issuer_cert: Certificate) -> TimeInstant:
    """
    Estime la fin de validité d'une preuve: la plus proche des dates de fin
    de sécurité de la fonction de hachage, du schéma de signature et de la
    longueur de clé, et de la date d'expiration du certificat de l'émetteur.

    Raises:
        UnknownPrimitive: Si une primitive de l'attestation est inconnue
    """
    return min(
        inv.secure_until(latest_attestation.hash_fn),
        inv.secure_until(Primitive.for_scheme(issuer_cert.params.scheme)),
        inv.secure_until(issuer_cert.params),
        issuer_cert.not_after,
    )


def update_entry(inv: SecurityInventory, primitive: PrimitiveLike, new_secure_until: TimeInstant,
                 at: TimeInstant) -> SecurityInventory:
    """
    Avance la date de fin de sécurité d'une primitive.

    Raises:
        LifetimeExtension: Si la nouvelle date prolonge la durée de vie
    """
    current = inv.entry(primitive)
    if new_secure_until > current.secure_until:
        raise LifetimeExtension(
            f"{current.primitive}: {new_secure_until} prolongerait la date actuelle "
            f"{current.secure_until}"
        )
    logger.info("Inventaire: %s sûr jusqu'au %s (au lieu du %s)",
                current.primitive, new_secure_until, current.secure_until)
    return inv.with_entry(replace(current, secure_until=new_secure_until, last_updated=at))


def select_hash(inv: SecurityInventory, current: Optional[HashFunctionId], at: TimeInstant,
                threshold: int) -> HashFunctionId:
    """
    Choisit la fonction de hachage d'un renouvellement.

    La fonction courante est conservée tant qu'elle reste sûre pendant toute
    la fenêtre ``[at, at + threshold]``; sinon la plus faible des fonctions
    plus robustes qui reste sûre au-delà de cette fenêtre est retenue.

    Raises:
        UnknownPrimitive: Si aucune fonction ne convient
    """
    horizon = at.plus_seconds(threshold)
    if current is not None and inv.secure_at(current, horizon):
        return current
    for candidate in sorted(HashFunctionId):
        if current is not None and candidate <= current:
            continue
        if inv.secure_at(candidate, horizon):
            return candidate
    raise UnknownPrimitive(f"Aucune fonction de hachage sûre après le {horizon}")
