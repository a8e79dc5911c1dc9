"""
Format XML des enregistrements de preuve (fichiers ``.er.xml``).

La sérialisation est déterministe: ordre des éléments fixé par le schéma
``schema/evidence-record.xsd``, instants en ISO-8601 UTC, champs binaires
en hexadécimal minuscule. Les certificats sont écrits à plat, de la
feuille vers la racine; la lecture rétablit le lien vers l'émetteur.
"""

import logging
import os
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from lxml import etree

from models.attestation import Attestation, IssuerKind, VerificationData
from models.auth_path import AuthPath, Side
from models.certificate import Certificate, CertificateRef, Crl
from models.document import DocumentSignature
from models.errors import RecordFormatError
from models.evidence import (
    BatchTree, ChainEntry, EntryKind, EvidenceRecord, MigrationMode, MigrationReceipt,
    NotarialState, ProofState, ProtectedItem, SharedProof, StructureKind, TreeRecord,
)
from models.primitives import HashFunctionId, SignatureParams
from models.time_instant import TimeInstant

logger = logging.getLogger(__name__)

NAMESPACE = "urn:mops:evidence-record:1"
SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schema", "evidence-record.xsd")
RECORD_EXTENSION = ".er.xml"

# Sections obligatoires, dans l'ordre du schéma
REQUIRED_SECTIONS = ("Structure", "HashHistory", "Entries", "Items", "Trees", "Receipts")

_SIDES = {Side.LEFT: "left", Side.RIGHT: "right"}


def _q(tag: str) -> str:
    return f"{{{NAMESPACE}}}{tag}"


def _local(element) -> str:
    return etree.QName(element).localname


@lru_cache(maxsize=1)
def load_schema() -> etree.XMLSchema:
    """Charge le schéma XSD livré avec le paquet."""
    return etree.XMLSchema(etree.parse(SCHEMA_PATH))


# =============================================================================
# Écriture
# =============================================================================

def _sub(parent, tag: str, text: Optional[str] = None, **attrs):
    element = etree.SubElement(parent, _q(tag))
    for key, value in attrs.items():
        if value is not None:
            element.set(key.replace("_", "-"), str(value))
    if text is not None:
        element.text = text
    return element


def _write_certificate(parent, cert: Certificate):
    issuer = cert.issuer_ref
    element = _sub(parent, "Certificate", subject=cert.subject, serial=cert.serial, key=cert.params.name,
                   not_before=cert.not_before.to_iso(), not_after=cert.not_after.to_iso(),
                   issuer_subject=issuer.subject, issuer_serial=issuer.serial)
    _sub(element, "PublicKey", cert.public_key.hex())
    _sub(element, "IssuerSignature", cert.issuer_signature.hex())


def _write_chain(parent, chain: Sequence[Certificate]):
    element = _sub(parent, "Chain")
    for cert in chain:
        _write_certificate(element, cert)


def _write_attestation(parent, att: Attestation):
    element = _sub(parent, "Attestation", issuer_kind=att.issuer_kind.name, hash=att.hash_fn.value,
                   stated_time=att.stated_time.to_iso(), issuer_subject=att.issuer_cert.subject,
                   issuer_serial=att.issuer_cert.serial)
    _sub(element, "Digest", att.attested_digest.hex())
    _sub(element, "Signature", att.signature.hex())


def _write_verification_data(parent, vd: VerificationData):
    element = _sub(parent, "VerificationData", collected_at=vd.collected_at.to_iso())
    _write_chain(element, vd.issuer_chain)
    crls = _sub(element, "Crls")
    for crl in vd.crls:
        crl_el = _sub(crls, "Crl", issuer_subject=crl.issuer.subject, issuer_serial=crl.issuer.serial,
                      issued_at=crl.issued_at.to_iso())
        for serial in sorted(crl.revoked_serials):
            _sub(crl_el, "Revoked", serial=serial)
        _sub(crl_el, "Signature", crl.signature.hex())


def _write_path(parent, path: AuthPath):
    element = _sub(parent, "AuthPath", leaf_index=path.leaf_index, hash=path.hash_fn.value)
    for digest, side in path.siblings:
        _sub(element, "Sibling", digest.hex(), side=_SIDES[side])


def _write_tree_paths(parent, paths: Tuple[Tuple[int, AuthPath], ...]):
    element = _sub(parent, "Paths")
    for tree, path in paths:
        _write_path(_sub(element, "Path", tree=tree), path)


def _write_entry(parent, entry: ChainEntry):
    element = _sub(parent, "Entry", kind=entry.kind.value, hash=entry.hash_fn.value,
                   item=entry.item, tree=entry.tree)
    if entry.item_digest is not None:
        _sub(element, "ItemDigest", entry.item_digest.hex())
    _write_attestation(element, entry.attestation)
    _write_verification_data(element, entry.verification_data)
    if entry.links:
        links = _sub(element, "Links")
        for link in entry.links:
            _sub(links, "Link", link.hex())
    if entry.paths:
        _write_tree_paths(element, entry.paths)
    if entry.shared is not None:
        _write_path(_sub(element, "Shared"), entry.shared.path)


def _write_item(parent, item: ProtectedItem):
    element = _sub(parent, "Item", name=item.name, batch="true" if item.batch else "false",
                   entry=item.entry, receipt=item.receipt)
    for leaf in item.leaves:
        _sub(element, "Leaf", leaf)
    if item.paths:
        _write_tree_paths(element, item.paths)
    if item.batch_trees:
        trees = _sub(element, "BatchTrees")
        for tree in item.batch_trees:
            tree_el = _sub(trees, "BatchTree", hash=tree.hash_fn.value, root=tree.root.hex())
            for leaf, path in tree.paths:
                _write_path(_sub(tree_el, "LeafPath", leaf=leaf), path)


def _write_receipt(parent, receipt: MigrationReceipt):
    first = receipt.first_attestation_time
    element = _sub(parent, "Receipt", source=receipt.source_kind.value, target=receipt.target_kind.value,
                   migrated_at=receipt.migrated_at.to_iso(), mode=receipt.mode.value,
                   first_attestation_time=first.to_iso() if first is not None else None)
    for name in receipt.documents:
        _sub(element, "Document", name)
    if receipt.source_record is not None:
        _write_record(_sub(element, "SourceRecord"), receipt.source_record)


def _write_record(parent, record: EvidenceRecord):
    attrs = {"format-version": record.format_version, "name": record.name,
             "created-at": record.created_at.to_iso()}
    if parent is None:
        root = etree.Element(_q("EvidenceRecord"), nsmap={None: NAMESPACE})
        for key, value in attrs.items():
            root.set(key, value)
    else:
        root = etree.SubElement(parent, _q("EvidenceRecord"), attrs)
    state = record.state
    _sub(root, "Structure", kind=state.kind.value)
    history = _sub(root, "HashHistory")
    for hash_fn in state.hash_history:
        _sub(history, "Hash", hash_fn.value)
    entries = _sub(root, "Entries")
    for entry in state.entries:
        _write_entry(entries, entry)
    items = _sub(root, "Items")
    for item in state.items:
        _write_item(items, item)
    trees = _sub(root, "Trees")
    for tree in state.trees:
        _sub(trees, "Tree", hash=tree.hash_fn.value, root=tree.root.hex(), entry=tree.entry, size=tree.size)
    if state.notarial is not None:
        notarial = _sub(root, "Notarial", original_time=state.notarial.original_time.to_iso())
        _write_chain(notarial, state.notarial.certificate.chain())
        digests = _sub(notarial, "History")
        for hash_fn, digest in state.notarial.history:
            _sub(digests, "Digest", digest.hex(), hash=hash_fn.value)
    receipts = _sub(root, "Receipts")
    for receipt in state.receipts:
        _write_receipt(receipts, receipt)
    return root


def record_to_element(record: EvidenceRecord):
    return _write_record(None, record)


def serialize_record(record: EvidenceRecord) -> bytes:
    """
    Sérialise un enregistrement en XML.

    Args:
        record (EvidenceRecord): Enregistrement

    Returns:
        bytes: Document XML UTF-8 (fonction pure de l'enregistrement)
    """
    root = record_to_element(record)
    return etree.tostring(root, xml_declaration=True, encoding="UTF-8", pretty_print=True)


# =============================================================================
# Lecture
# =============================================================================

def _fail(element, message: str, section: str = ""):
    position = f"ligne {element.sourceline}" if element is not None and element.sourceline else ""
    raise RecordFormatError(message, section=section, position=position)


def _child(element, tag: str, section: str, required: bool = True):
    found = element.find(_q(tag))
    if found is None and required:
        _fail(element, f"Élément {tag} manquant", section or tag)
    return found


def _children(element, tag: str) -> List:
    if element is None:
        return []
    return element.findall(_q(tag))


def _hex(element) -> bytes:
    return bytes.fromhex(element.text or "")


def _time(value: str) -> TimeInstant:
    return TimeInstant.parse(value)


def _int(element, name: str) -> Optional[int]:
    value = element.get(name)
    return None if value is None else int(value)


def _read_chain(element) -> Tuple[Certificate, ...]:
    flat = []
    for cert_el in _children(element, "Certificate"):
        flat.append((
            cert_el.get("subject"),
            cert_el.get("key"),
            cert_el.get("not-before"),
            cert_el.get("not-after"),
            int(cert_el.get("serial")),
            _hex(_child(cert_el, "PublicKey", "Certificate")),
            _hex(_child(cert_el, "IssuerSignature", "Certificate")),
        ))
    chain: List[Certificate] = []
    issuer = None
    for subject, key, not_before, not_after, serial, public_key, signature in reversed(flat):
        issuer = Certificate(subject, issuer, public_key, SignatureParams.parse(key),
                             _time(not_before), _time(not_after), serial, signature)
        chain.append(issuer)
    return tuple(reversed(chain))


def _read_attestation(element) -> Attestation:
    return Attestation(
        issuer_kind=IssuerKind.parse(element.get("issuer-kind")),
        attested_digest=_hex(_child(element, "Digest", "Attestation")),
        hash_fn=HashFunctionId.parse(element.get("hash")),
        stated_time=_time(element.get("stated-time")),
        issuer_cert=CertificateRef(element.get("issuer-subject"), int(element.get("issuer-serial"))),
        signature=_hex(_child(element, "Signature", "Attestation")),
    )


def _read_verification_data(element) -> VerificationData:
    crls = []
    for crl_el in _children(_child(element, "Crls", "VerificationData"), "Crl"):
        crls.append(Crl(
            issuer=CertificateRef(crl_el.get("issuer-subject"), int(crl_el.get("issuer-serial"))),
            issued_at=_time(crl_el.get("issued-at")),
            revoked_serials=frozenset(int(r.get("serial")) for r in _children(crl_el, "Revoked")),
            signature=_hex(_child(crl_el, "Signature", "VerificationData")),
        ))
    return VerificationData(
        issuer_chain=_read_chain(_child(element, "Chain", "VerificationData")),
        crls=tuple(crls),
        collected_at=_time(element.get("collected-at")),
    )


def _read_path(element) -> AuthPath:
    siblings = tuple(
        (_hex(sibling), Side.LEFT if sibling.get("side") == "left" else Side.RIGHT)
        for sibling in _children(element, "Sibling")
    )
    return AuthPath(int(element.get("leaf-index")), siblings, HashFunctionId.parse(element.get("hash")))


def _read_tree_paths(element) -> Tuple[Tuple[int, AuthPath], ...]:
    return tuple(
        (int(path_el.get("tree")), _read_path(_child(path_el, "AuthPath", "Paths")))
        for path_el in _children(element, "Path")
    )


def _read_entry(element) -> ChainEntry:
    digest_el = _child(element, "ItemDigest", "Entries", required=False)
    shared_el = _child(element, "Shared", "Entries", required=False)
    return ChainEntry(
        kind=EntryKind(element.get("kind")),
        hash_fn=HashFunctionId.parse(element.get("hash")),
        attestation=_read_attestation(_child(element, "Attestation", "Entries")),
        verification_data=_read_verification_data(_child(element, "VerificationData", "Entries")),
        item=_int(element, "item"),
        item_digest=_hex(digest_el) if digest_el is not None else None,
        tree=_int(element, "tree"),
        links=tuple(_hex(link) for link in _children(_child(element, "Links", "", False), "Link")),
        paths=_read_tree_paths(_child(element, "Paths", "", False)),
        shared=SharedProof(_read_path(_child(shared_el, "AuthPath", "Entries")))
        if shared_el is not None else None,
    )


def _read_item(element) -> ProtectedItem:
    batch_trees = []
    for tree_el in _children(_child(element, "BatchTrees", "", False), "BatchTree"):
        paths = tuple((leaf_el.get("leaf"), _read_path(_child(leaf_el, "AuthPath", "Items")))
                      for leaf_el in _children(tree_el, "LeafPath"))
        batch_trees.append(BatchTree(HashFunctionId.parse(tree_el.get("hash")),
                                     bytes.fromhex(tree_el.get("root")), paths))
    return ProtectedItem(
        name=element.get("name"),
        leaves=tuple(leaf.text or "" for leaf in _children(element, "Leaf")),
        batch=element.get("batch") in ("true", "1"),
        entry=int(element.get("entry")),
        paths=_read_tree_paths(_child(element, "Paths", "", False)),
        batch_trees=tuple(batch_trees),
        receipt=_int(element, "receipt"),
    )


def _read_receipt(element) -> MigrationReceipt:
    source_el = _child(element, "SourceRecord", "Receipts", required=False)
    first = element.get("first-attestation-time")
    return MigrationReceipt(
        source_kind=StructureKind.parse(element.get("source")),
        target_kind=StructureKind.parse(element.get("target")),
        migrated_at=_time(element.get("migrated-at")),
        mode=MigrationMode(element.get("mode")),
        documents=tuple(doc.text or "" for doc in _children(element, "Document")),
        source_record=element_to_record(_child(source_el, "EvidenceRecord", "Receipts"))
        if source_el is not None else None,
        first_attestation_time=_time(first) if first is not None else None,
    )


def _read_notarial(element) -> NotarialState:
    chain = _read_chain(_child(element, "Chain", "Notarial"))
    if not chain:
        _fail(element, "Certificat du signataire manquant", "Notarial")
    history = tuple((HashFunctionId.parse(d.get("hash")), _hex(d))
                    for d in _children(_child(element, "History", "Notarial"), "Digest"))
    return NotarialState(_time(element.get("original-time")), chain[0], history)


def element_to_record(root) -> EvidenceRecord:
    """
    Reconstruit un enregistrement depuis son élément XML.

    Raises:
        RecordFormatError: Section manquante ou incohérente
    """
    if root.tag != _q("EvidenceRecord"):
        _fail(root, f"Élément racine inattendu: {_local(root)}", "EvidenceRecord")
    for section in REQUIRED_SECTIONS:
        _child(root, section, section)

    try:
        kind = StructureKind.parse(_child(root, "Structure", "Structure").get("kind") or "")
        notarial_el = _child(root, "Notarial", "Notarial", required=False)
        state = ProofState(
            kind=kind,
            entries=tuple(_read_entry(e) for e in _children(_child(root, "Entries", "Entries"), "Entry")),
            items=tuple(_read_item(i) for i in _children(_child(root, "Items", "Items"), "Item")),
            trees=tuple(
                TreeRecord(HashFunctionId.parse(t.get("hash")), bytes.fromhex(t.get("root")),
                           int(t.get("entry")), int(t.get("size")))
                for t in _children(_child(root, "Trees", "Trees"), "Tree")
            ),
            notarial=_read_notarial(notarial_el) if notarial_el is not None else None,
            receipts=tuple(_read_receipt(r) for r in _children(_child(root, "Receipts", "Receipts"), "Receipt")),
        )
        record = EvidenceRecord(
            name=root.get("name") or "",
            state=state,
            created_at=_time(root.get("created-at") or ""),
            format_version=root.get("format-version") or "",
        )
    except RecordFormatError:
        raise
    except (ValueError, TypeError) as exc:
        _fail(root, f"Valeur invalide: {exc}", "EvidenceRecord")

    declared = tuple(HashFunctionId.parse(h.text or "") for h in _children(_child(root, "HashHistory", ""), "Hash"))
    if declared != state.hash_history:
        _fail(root, "Historique des fonctions de hachage incohérent avec les entrées", "HashHistory")
    return record


def _missing_section(data: bytes) -> str:
    """Première section obligatoire absente d'un document tronqué."""
    parser = etree.XMLParser(recover=True, resolve_entities=False)
    root = etree.fromstring(data, parser)
    if root is None:
        return "EvidenceRecord"
    for section in REQUIRED_SECTIONS:
        if root.find(_q(section)) is None:
            return section
    return "EvidenceRecord"


def _section_from_path(path: str) -> str:
    """Section désignée par le chemin d'une erreur de validation."""
    names = [segment.split("[")[0].split(":")[-1].split("}")[-1] for segment in path.split("/") if segment]
    for name in names[1:]:
        if name in REQUIRED_SECTIONS or name == "Notarial":
            return name
    return names[-1] if names else "EvidenceRecord"


def parse_record(data: bytes, validate: bool = True) -> EvidenceRecord:
    """
    Analyse un enregistrement XML.

    Args:
        data (bytes): Document XML
        validate (bool): Valider contre le schéma XSD

    Returns:
        EvidenceRecord: Enregistrement

    Raises:
        RecordFormatError: Document mal formé ou non conforme au schéma
    """
    parser = etree.XMLParser(remove_blank_text=True, resolve_entities=False, no_network=True)
    try:
        root = etree.fromstring(data, parser)
    except etree.XMLSyntaxError as exc:
        section = _missing_section(data) if data.strip() else "EvidenceRecord"
        raise RecordFormatError(f"XML mal formé: {exc}", section=section,
                                position=f"ligne {exc.lineno}") from exc

    if validate:
        schema = load_schema()
        if not schema.validate(root):
            error = schema.error_log.last_error
            section = _section_from_path(error.path or "")
            raise RecordFormatError(f"Non conforme au schéma: {error.message}", section=section,
                                    position=f"ligne {error.line}")
    record = element_to_record(root)
    logger.debug("Enregistrement %s lu (%s, %d entrées)", record.name, record.kind, len(record.state.entries))
    return record


def write_record(record: EvidenceRecord, path: str) -> str:
    """Écrit un enregistrement dans un fichier ``.er.xml``."""
    with open(path, "wb") as f:
        f.write(serialize_record(record))
    logger.info("Enregistrement %s écrit: %s", record.name, path)
    return path


def read_record(path: str, validate: bool = True) -> EvidenceRecord:
    with open(path, "rb") as f:
        return parse_record(f.read(), validate)


# =============================================================================
# Fichiers de signature (.sig.xml)
# =============================================================================

SIGNATURE_EXTENSION = ".sig.xml"


def serialize_signature(signature: DocumentSignature) -> bytes:
    """Sérialise une signature détachée."""
    root = etree.Element(_q("DocumentSignature"), nsmap={None: NAMESPACE})
    root.set("method", signature.method_id)
    root.set("signing-time", signature.signing_time.to_iso())
    _sub(root, "Digest", signature.doc_digest.hex())
    _write_chain(root, signature.signer_cert.chain())
    _sub(root, "Value", signature.signature_value.hex())
    return etree.tostring(root, xml_declaration=True, encoding="UTF-8", pretty_print=True)


def parse_signature(data: bytes) -> DocumentSignature:
    """
    Raises:
        RecordFormatError: Fichier de signature illisible
    """
    parser = etree.XMLParser(remove_blank_text=True, resolve_entities=False, no_network=True)
    try:
        root = etree.fromstring(data, parser)
    except etree.XMLSyntaxError as exc:
        raise RecordFormatError(f"Signature mal formée: {exc}", section="DocumentSignature",
                                position=f"ligne {exc.lineno}") from exc
    if root.tag != _q("DocumentSignature"):
        _fail(root, f"Élément racine inattendu: {_local(root)}", "DocumentSignature")
    try:
        chain = _read_chain(_child(root, "Chain", "DocumentSignature"))
        if not chain:
            _fail(root, "Certificat du signataire manquant", "DocumentSignature")
        return DocumentSignature(
            method_id=root.get("method") or "",
            doc_digest=_hex(_child(root, "Digest", "DocumentSignature")),
            signing_time=_time(root.get("signing-time") or ""),
            signer_cert=chain[0],
            signature_value=_hex(_child(root, "Value", "DocumentSignature")),
        )
    except RecordFormatError:
        raise
    except (ValueError, TypeError) as exc:
        _fail(root, f"Valeur invalide: {exc}", "DocumentSignature")
