"""
Conteneur de transfert MoPS (``.mops.zip``).

Arborescence de l'archive:

    documents/<nom>              contenu du document
    signatures/<nom>.sig.xml     signature détachée du document
    evidence/<dossier>.er.xml    preuve d'existence d'un dossier

Les entrées sont écrites dans l'ordre alphabétique avec une date fixe: deux
exports des mêmes données produisent la même archive.
"""

import io
import logging
import zipfile
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from core.crypto_core import verify_document
from models.document import InputData
from models.errors import ContainerError, RecordFormatError
from models.evidence import EvidenceRecord

from .evidence_xml import (
    RECORD_EXTENSION, SIGNATURE_EXTENSION, parse_record, parse_signature, serialize_record,
    serialize_signature,
)

logger = logging.getLogger(__name__)

CONTAINER_EXTENSION = ".mops.zip"
DOCUMENTS_DIR = "documents/"
SIGNATURES_DIR = "signatures/"
EVIDENCE_DIR = "evidence/"

# Date fixe des entrées (format ZIP: 1980 au plus tôt)
ZIP_FIXED_TIMESTAMP = (1980, 1, 1, 0, 0, 0)


@dataclass(frozen=True)
class MopsContainer:
    """
    Contenu d'un conteneur MoPS.

    Attributes:
        documents (Tuple[InputData, ...]): Documents et signatures
        records (Tuple[EvidenceRecord, ...]): Preuves des dossiers
    """

    documents: Tuple[InputData, ...]
    records: Tuple[EvidenceRecord, ...] = ()

    def document(self, name: str) -> InputData:
        for doc in self.documents:
            if doc.name == name:
                return doc
        raise ContainerError(f"Document absent du conteneur: {name}")

    def documents_of(self, record: EvidenceRecord) -> List[InputData]:
        """Documents couverts par une preuve."""
        return [self.document(name) for name in dict.fromkeys(record.state.document_names)]

    def print_summary(self):
        print(f"\n{'='*60}")
        print("CONTENEUR MOPS")
        print(f"{'='*60}")
        print(f"Documents: {len(self.documents)}")
        for doc in self.documents:
            print(f"  • {doc}")
        print(f"Preuves: {len(self.records)}")
        for record in self.records:
            print(f"  • {record.name} ({record.kind}, {len(record.state.entries)} attestation(s))")
        print(f"{'='*60}\n")


def _check_name(name: str):
    if not name or "/" in name or "\\" in name or name in (".", ".."):
        raise ContainerError(f"Nom de fichier invalide dans le conteneur: {name!r}")


def _check_consistency(documents: Iterable[InputData], records: Iterable[EvidenceRecord]):
    names = set()
    for doc in documents:
        _check_name(doc.name)
        if doc.name in names:
            raise ContainerError(f"Document en double: {doc.name}")
        names.add(doc.name)
    for record in records:
        _check_name(record.name)
        missing = [name for name in record.state.document_names if name not in names]
        if missing:
            raise ContainerError(f"Preuve orpheline {record.name}: documents absents {', '.join(missing)}")


def container_entries(documents: Iterable[InputData], records: Iterable[EvidenceRecord] = ()) -> Dict[str, bytes]:
    documents = list(documents)
    records = list(records)
    _check_consistency(documents, records)
    entries: Dict[str, bytes] = {}
    for doc in documents:
        entries[DOCUMENTS_DIR + doc.name] = doc.document
        entries[SIGNATURES_DIR + doc.name + SIGNATURE_EXTENSION] = serialize_signature(doc.signature)
    for record in records:
        entries[EVIDENCE_DIR + record.name + RECORD_EXTENSION] = serialize_record(record)
    return entries


def export_container(documents: Iterable[InputData], records: Iterable[EvidenceRecord] = ()) -> bytes:
    """
    Construit un conteneur MoPS.

    Args:
        documents (Iterable[InputData]): Documents signés
        records (Iterable[EvidenceRecord]): Preuves des dossiers

    Returns:
        bytes: Archive ZIP

    Raises:
        ContainerError: Noms invalides, doublons ou preuve orpheline
    """
    entries = container_entries(documents, records)
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, mode="w", compression=zipfile.ZIP_DEFLATED) as archive:
        for name in sorted(entries):
            info = zipfile.ZipInfo(name)
            info.date_time = ZIP_FIXED_TIMESTAMP
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = (0o100644 & 0xFFFF) << 16
            info.create_system = 3
            archive.writestr(info, entries[name])
    logger.info("Conteneur exporté: %d entrées", len(entries))
    return buffer.getvalue()


def import_container(data: bytes) -> MopsContainer:
    """
    Lit un conteneur MoPS.

    Seules les paires document/signature valides sont acceptées.

    Raises:
        ContainerError: Archive illisible, signature manquante ou invalide,
            fichier orphelin
    """
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise ContainerError(f"Archive ZIP illisible: {exc}") from exc

    contents: Dict[str, bytes] = {}
    signatures: Dict[str, bytes] = {}
    evidence: Dict[str, bytes] = {}
    with archive:
        for info in archive.infolist():
            if info.is_dir():
                continue
            name = info.filename
            if name.startswith(DOCUMENTS_DIR):
                contents[name[len(DOCUMENTS_DIR):]] = archive.read(info)
            elif name.startswith(SIGNATURES_DIR) and name.endswith(SIGNATURE_EXTENSION):
                signatures[name[len(SIGNATURES_DIR):-len(SIGNATURE_EXTENSION)]] = archive.read(info)
            elif name.startswith(EVIDENCE_DIR) and name.endswith(RECORD_EXTENSION):
                evidence[name[len(EVIDENCE_DIR):-len(RECORD_EXTENSION)]] = archive.read(info)
            else:
                raise ContainerError(f"Entrée inattendue dans le conteneur: {name}")

    orphans = sorted(set(signatures) - set(contents))
    if orphans:
        raise ContainerError(f"Signature sans document: {', '.join(orphans)}")

    documents = []
    for name in sorted(contents):
        _check_name(name)
        if name not in signatures:
            raise ContainerError(f"Signature manquante pour {name}")
        try:
            signature = parse_signature(signatures[name])
        except RecordFormatError as exc:
            raise ContainerError(f"Signature illisible pour {name}: {exc}") from exc
        if not verify_document(contents[name], signature):
            raise ContainerError(f"Signature invalide pour {name}")
        documents.append(InputData(name, contents[name], signature))

    records = []
    for folder in sorted(evidence):
        record = parse_record(evidence[folder])
        if record.name != folder:
            raise ContainerError(f"Preuve {folder}{RECORD_EXTENSION} nommée {record.name}")
        records.append(record)
    _check_consistency(documents, records)
    logger.info("Conteneur importé: %d document(s), %d preuve(s)", len(documents), len(records))
    return MopsContainer(tuple(documents), tuple(records))


def write_container(path: str, documents: Iterable[InputData], records: Iterable[EvidenceRecord] = ()) -> str:
    with open(path, "wb") as f:
        f.write(export_container(documents, records))
    logger.info("Conteneur écrit: %s", path)
    return path


def read_container(path: str) -> MopsContainer:
    with open(path, "rb") as f:
        return import_container(f.read())
