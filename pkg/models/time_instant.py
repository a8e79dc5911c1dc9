"""
Instants du temps simulé.

Toutes les décisions (émission, expiration, renouvellement) se prennent sur
une horloge simulée à la seconde près. Un instant est un nombre entier de
secondes depuis l'époque Unix (1970-01-01T00:00:00Z), ce qui rend les
additions de jours et d'années exactes.

Conventions:
- Une durée d'une année vaut exactement 365 jours (durées de certificats).
- L'horizon de simulation et les ajouts annuels avancent en années
  calendaires (plus_years).
- Les dates calendaires (ex: 2038-01-01) sont converties via le calendrier
  grégorien UTC.
"""

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

SECONDS_PER_DAY = 86400
DAY = SECONDS_PER_DAY
YEAR = 365 * DAY  # année simulée (durées exactes)

# Largeur de l'encodage binaire d'un instant (entier signé big-endian)
TIME_ENCODING_BYTES = 8

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True, order=True)
class TimeInstant:
    """
    Instant simulé, totalement ordonné.

    Attributes:
        seconds (int): Secondes depuis l'époque simulée
    """

    seconds: int

    def __post_init__(self):
        if not isinstance(self.seconds, int) or isinstance(self.seconds, bool):
            raise TypeError(f"Un instant doit être un entier de secondes: {self.seconds!r}")

    # --- construction -------------------------------------------------

    @staticmethod
    def from_datetime(moment: datetime) -> "TimeInstant":
        """Convertit un datetime (naïf = UTC) en instant simulé."""
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
        delta = moment.astimezone(timezone.utc) - _EPOCH
        return TimeInstant(delta.days * SECONDS_PER_DAY + delta.seconds)

    @staticmethod
    def from_date(year: int, month: int = 1, day: int = 1) -> "TimeInstant":
        """Instant correspondant au début (00:00:00Z) d'une date calendaire."""
        return TimeInstant.from_datetime(datetime(year, month, day, tzinfo=timezone.utc))

    @staticmethod
    def parse(text: str) -> "TimeInstant":
        """
        Analyse une date ISO-8601 UTC (``2038-01-01T00:00:00Z``) ou une
        simple date (``2038-01-01``).

        Raises:
            ValueError: Si le texte n'est pas une date ISO-8601
        """
        value = text.strip()
        if value.endswith("Z"):
            value = value[:-1] + "+00:00"
        moment = datetime.fromisoformat(value)
        return TimeInstant.from_datetime(moment)

    # --- arithmétique -------------------------------------------------

    def plus_seconds(self, seconds: int) -> "TimeInstant":
        return TimeInstant(self.seconds + seconds)

    def plus_days(self, days: int) -> "TimeInstant":
        return TimeInstant(self.seconds + days * DAY)

    def plus_years(self, years: int) -> "TimeInstant":
        """Avance d'années calendaires (un 29 février devient un 28 février)."""
        moment = self.to_datetime()
        try:
            moment = moment.replace(year=moment.year + years)
        except ValueError:
            moment = moment.replace(year=moment.year + years, day=28)
        return TimeInstant.from_datetime(moment)

    def minus(self, other: "TimeInstant") -> int:
        """Durée en secondes entre deux instants (self - other)."""
        return self.seconds - other.seconds

    # --- formats ------------------------------------------------------

    def to_datetime(self) -> datetime:
        return _EPOCH + timedelta(seconds=self.seconds)

    def to_iso(self) -> str:
        """Format ISO-8601 UTC à la seconde (``YYYY-MM-DDTHH:MM:SSZ``)."""
        return self.to_datetime().strftime("%Y-%m-%dT%H:%M:%SZ")

    @property
    def year(self) -> int:
        return self.to_datetime().year

    def encode(self) -> bytes:
        """Encodage canonique sur 8 octets big-endian signés."""
        return self.seconds.to_bytes(TIME_ENCODING_BYTES, "big", signed=True)

    @staticmethod
    def decode(data: bytes) -> "TimeInstant":
        return TimeInstant(int.from_bytes(data, "big", signed=True))

    def __str__(self) -> str:
        return self.to_iso()
