"""
Service de stockage: objets binaires dans un dossier unique.

Chaque objet déposé reçoit un identifiant aléatoire de 128 bits; deux dépôts
des mêmes octets donnent deux identifiants distincts. Le dossier local est le
seul support implémenté: un autre support (stockage objet distant...) n'a
qu'à fournir ``put`` et ``get``.
"""

import logging
import os
import re
import secrets
import threading
from typing import List

from models.errors import StorageFailure, UnknownHandle

logger = logging.getLogger(__name__)

HANDLE_BYTES = 16
OBJECT_EXTENSION = ".obj"
_HANDLE_PATTERN = re.compile(r"^[0-9a-f]{%d}$" % (2 * HANDLE_BYTES))


class LocalFolderStorage:
    """
    Stockage d'objets dans un dossier.

    Attributes:
        root (str): Dossier de stockage
    """

    def __init__(self, root: str = "storage"):
        self.root = root
        self._lock = threading.Lock()
        try:
            os.makedirs(root, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"Dossier de stockage inutilisable {root}: {exc}") from exc

    def _path(self, handle: str) -> str:
        if not _HANDLE_PATTERN.match(handle):
            raise UnknownHandle(f"Identifiant d'objet invalide: {handle!r}")
        return os.path.join(self.root, handle + OBJECT_EXTENSION)

    def put(self, data: bytes) -> str:
        """
        Dépose un objet.

        Returns:
            str: Identifiant opaque de l'objet

        Raises:
            StorageFailure: Si l'écriture échoue
        """
        with self._lock:
            handle = secrets.token_hex(HANDLE_BYTES)
            while os.path.exists(self._path(handle)):
                handle = secrets.token_hex(HANDLE_BYTES)
            path = self._path(handle)
            try:
                with open(path, 'wb') as f:
                    f.write(data)
            except OSError as exc:
                raise StorageFailure(f"Écriture impossible de {path}: {exc}") from exc
        logger.info("Stockage: objet %s déposé (%d octets)", handle, len(data))
        return handle

    def get(self, handle: str) -> bytes:
        """
        Raises:
            UnknownHandle: Si aucun objet ne porte cet identifiant
            StorageFailure: Si la lecture échoue
        """
        path = self._path(handle)
        if not os.path.isfile(path):
            raise UnknownHandle(f"Objet inconnu: {handle}")
        try:
            with open(path, 'rb') as f:
                return f.read()
        except OSError as exc:
            raise StorageFailure(f"Lecture impossible de {path}: {exc}") from exc

    def exists(self, handle: str) -> bool:
        try:
            return os.path.isfile(self._path(handle))
        except UnknownHandle:
            return False

    def handles(self) -> List[str]:
        return sorted(name[:-len(OBJECT_EXTENSION)] for name in os.listdir(self.root)
                      if name.endswith(OBJECT_EXTENSION))


def storage_put(storage: LocalFolderStorage, data: bytes) -> str:
    return storage.put(data)


def storage_get(storage: LocalFolderStorage, handle: str) -> bytes:
    return storage.get(handle)
