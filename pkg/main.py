"""
Programme principal - Preuves d'existence à long terme (MoPS).

Signature de documents, protection par une structure de preuve (AS, MTS,
MDS, SLS, NAW), ajout, renouvellement, migration, vérification, échange de
conteneurs MoPS, système de protection et simulation sur 100 ans.

Codes de sortie: 0 succès, 1 vérification ou opération refusée, 2 usage
(dont les combinaisons impossibles), 3 erreur de service.

Auteur: Projet MoPS
Date: 2025
"""

import argparse
import logging
import os
import sys
from datetime import datetime, timezone
from typing import Dict, Iterable, List, Optional, Tuple

# Ajouter le répertoire parent au path pour les imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from models.attestation import IssuerKind
from models.document import InputData
from models.errors import (
    IncompatibleAttester, MalformedMessage, MopsError, ServiceError, StorageFailure, UnknownEndpoint,
    UnknownHandle,
)
from models.evidence import EvidenceRecord, StructureKind
from models.primitives import HashFunctionId
from models.time_instant import TimeInstant
from core.attestation import Attester, NotarialAuthority, TimestampAuthority
from core.crypto_core import FixturePki
from core.migration import migrate_to_sequence, na_attest_migrate
from core.renewal import RENEWAL_THRESHOLD, add_document, protect, renew, renew_if_due
from core.scheme import (
    Retrieval, SchemeConfig, Storage, Trust, WizardAnswers, expert_preset, wizard_select,
)
from core.security_inventory import SecurityInventory, default_lenstra_inventory, select_hash
from core.simulation import SIMULATION_START, SIMULATION_YEARS, simulate
from core.verification import proof_validity, verify_proof
from data_io.container import CONTAINER_EXTENSION, MopsContainer, read_container, write_container
from data_io.document_generator import DocumentGenerator
from data_io.inventory_file import load_inventory, save_inventory
from data_io.protection_registry import ProtectionRegistry
from data_io.report_writer import ReportWriter
from service.client import RemoteNa, connect
from service.server import ENDPOINTS, ServiceHost, serve

logger = logging.getLogger("mops")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_SERVICE = 3

SERVICE_ERRORS = (ServiceError, MalformedMessage, UnknownEndpoint, StorageFailure, UnknownHandle,
                  ConnectionError)
DEFAULT_STATE_DIR = ".mops"


def print_header():
    """Affiche l'en-tête du programme."""
    print("\n" + "="*80)
    print(" "*18 + "PREUVES D'EXISTENCE À LONG TERME (MoPS)")
    print(" "*12 + "AS · MTS · MDS · SLS · NAW - horodatage et notariat")
    print("="*80 + "\n")


def print_footer():
    """Affiche le pied de page du programme."""
    print("\n" + "="*80)
    print(" "*25 + "TRAITEMENT TERMINÉ AVEC SUCCÈS")
    print("="*80 + "\n")


# =============================================================================
# Contexte d'exécution
# =============================================================================

def parse_clock(value: Optional[str]) -> TimeInstant:
    """Date simulée (``--clock``), l'heure courante par défaut."""
    if not value:
        return TimeInstant.from_datetime(datetime.now(timezone.utc))
    return TimeInstant.parse(value)


class Session:
    """
    Horloge, inventaire, PKI et fournisseurs d'une commande.

    Les fournisseurs locaux s'appuient sur une PKI déterministe (graine
    ``--seed``); les certificats déjà présents dans les preuves lues sont
    repris avant toute émission.
    """

    def __init__(self, args: argparse.Namespace):
        self.clock = parse_clock(getattr(args, "clock", None))
        path = getattr(args, "inventory", None)
        self.inventory: SecurityInventory = load_inventory(path) if path else default_lenstra_inventory()
        self.pki = FixturePki(args.seed, SIMULATION_START)
        self._attesters: Dict[tuple, Attester] = {}

    def adopt(self, documents: Iterable[InputData] = (), records: Iterable[EvidenceRecord] = ()):
        certificates = []
        for doc in documents:
            certificates.extend(doc.signature.signer_cert.chain())
        for record in records:
            for entry in record.state.entries:
                certificates.extend(entry.verification_data.issuer_chain)
        self.pki.adopt(certificates)

    def attester(self, kind: IssuerKind, endpoint: Optional[str] = None) -> Attester:
        key = (kind, endpoint)
        if key not in self._attesters:
            if endpoint:
                self._attesters[key] = connect(endpoint, kind)
            elif kind is IssuerKind.NA:
                self._attesters[key] = NotarialAuthority(self.pki, self.inventory)
            else:
                self._attesters[key] = TimestampAuthority(self.pki)
            logger.info("Fournisseur %s: %s", kind.name, endpoint or "local")
        return self._attesters[key]

    def initial_hash(self, requested: Optional[HashFunctionId], threshold: int = RENEWAL_THRESHOLD) -> HashFunctionId:
        return requested or select_hash(self.inventory, None, self.clock, threshold)


def scheme_from_args(args: argparse.Namespace, default: Optional[StructureKind] = None) -> SchemeConfig:
    """
    Schéma demandé: schéma connu (``--scheme``) puis options explicites.

    Raises:
        IncompatibleAttester: NAW avec une TSA
    """
    base = expert_preset(args.scheme) if getattr(args, "scheme", None) else None
    structure = args.structure or (base.structure if base else default or StructureKind.AS)
    if args.attester:
        attester = args.attester
    elif base is not None and base.structure is structure:
        attester = base.attester
    else:
        attester = IssuerKind.NA if structure is StructureKind.NAW else IssuerKind.TSA
    return SchemeConfig(structure, attester, args.hash or HashFunctionId.SHA256, args.endpoint,
                        name=base.name if base else "")


def open_container(path: str, session: Session) -> MopsContainer:
    container = read_container(path)
    session.adopt(container.documents, container.records)
    return container


def select_records(container: MopsContainer, name: Optional[str]) -> List[EvidenceRecord]:
    if name is None:
        if not container.records:
            raise ValueError("Le conteneur ne contient aucune preuve")
        return list(container.records)
    records = [record for record in container.records if record.name == name]
    if not records:
        raise ValueError(f"Preuve inconnue: {name}")
    return records


def replace_records(container: MopsContainer, old: Iterable[EvidenceRecord],
                    new: Iterable[EvidenceRecord]) -> List[EvidenceRecord]:
    removed = {record.name for record in old}
    kept = [record for record in container.records if record.name not in removed]
    return kept + list(new)


def print_record(record: EvidenceRecord, inv: SecurityInventory, marker: str = "✓"):
    state = record.state
    print(f"  {marker} {record.name:<24} {state.kind.value:<4} {len(state.entries):>3} attestation(s), "
          f"{state.current_hash}, valide jusqu'au {proof_validity(state, inv).to_iso()}")


def migrate_record(record: EvidenceRecord, docs: List[InputData], config: SchemeConfig, session: Session,
                   batch: bool = False) -> List[EvidenceRecord]:
    """Migre une preuve vers la structure et la technique du schéma."""
    attester = session.attester(config.attester, config.endpoint)
    t = session.clock
    h = select_hash(session.inventory, max(record.state.current_hash, config.hash_fn), t,
                    config.renewal_threshold)
    if config.structure is StructureKind.NAW:
        if isinstance(attester, RemoteNa):
            return attester.migrate(record, docs, t, h, batch)
        return na_attest_migrate(attester, record, docs, t, h, batch, session.inventory)
    state, _ = migrate_to_sequence(record, docs, config.structure, t, h, attester,
                                   inventory=session.inventory)
    return [record.with_state(state)]


def needs_migration(record: EvidenceRecord, config: SchemeConfig) -> bool:
    last = record.state.last_entry.attestation
    return record.kind is not config.structure or last.issuer_kind != config.attester


def renew_record(record: EvidenceRecord, docs: List[InputData], session: Session, force: bool = False,
                 endpoint: Optional[str] = None, threshold: int = RENEWAL_THRESHOLD) -> Optional[EvidenceRecord]:
    """Renouvelle une preuve si nécessaire (toujours avec ``force``)."""
    kind = record.state.last_entry.attestation.issuer_kind
    attester = session.attester(kind, endpoint)
    if force:
        state = renew(record, docs, session.clock, attester, session.inventory, threshold=threshold)
    else:
        state = renew_if_due(record, docs, session.clock, attester, session.inventory, threshold)
    return record.with_state(state) if state is not None else None


# =============================================================================
# Commandes
# =============================================================================

def cmd_sign(args: argparse.Namespace) -> int:
    """Signe des fichiers: un conteneur MoPS par fichier."""
    session = Session(args)
    generator = DocumentGenerator(session.pki, args.seed, session.inventory)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    for path in args.files:
        doc = generator.sign_file(path, session.clock)
        output = write_container(os.path.join(out_dir, doc.name + CONTAINER_EXTENSION), [doc])
        print(f"  ✓ {doc} → {output}")
    return EXIT_OK


def _documents_from(paths: Iterable[str], session: Session) -> List[InputData]:
    docs: Dict[str, InputData] = {}
    for path in paths:
        for doc in open_container(path, session).documents:
            if doc.name in docs:
                raise ValueError(f"Document en double: {doc.name}")
            docs[doc.name] = doc
    return list(docs.values())


def cmd_protect(args: argparse.Namespace) -> int:
    """Protège les documents de conteneurs signés par une nouvelle preuve."""
    session = Session(args)
    config = scheme_from_args(args)
    docs = _documents_from(args.containers, session)
    attester = session.attester(config.attester, config.endpoint)
    h = session.initial_hash(args.hash)
    name = args.name or os.path.basename(args.containers[0]).replace(CONTAINER_EXTENSION, "")
    state = protect(config.structure, docs, session.clock, h, attester, name)
    record = EvidenceRecord(name, state, session.clock)
    output = write_container(args.out or name + CONTAINER_EXTENSION, docs, [record])
    print(f"Schéma: {config}")
    print_record(record, session.inventory)
    print(f"Conteneur: {output}")
    return EXIT_OK


def cmd_add(args: argparse.Namespace) -> int:
    """Ajoute des documents signés à une MDS ou une SLS."""
    session = Session(args)
    container = open_container(args.container, session)
    record = select_records(container, args.record)[0]
    new_docs = _documents_from(args.documents, session)
    attester = session.attester(record.state.last_entry.attestation.issuer_kind, args.endpoint)
    docs = container.documents_of(record)
    state = record.state
    for doc in new_docs:
        state = add_document(state, doc, session.clock, attester, docs, session.inventory, args.hash)
        docs.append(doc)
        print(f"  ✓ {doc.name} ajouté à {record.name}")
    updated = record.with_state(state)
    documents = list(container.documents) + new_docs
    write_container(args.out or args.container, documents, replace_records(container, [record], [updated]))
    print_record(updated, session.inventory)
    return EXIT_OK


def cmd_renew(args: argparse.Namespace) -> int:
    """
    Met à jour les preuves d'un conteneur: migration si une autre structure
    ou technique est demandée, puis renouvellement si nécessaire.
    """
    session = Session(args)
    container = open_container(args.container, session)
    records = select_records(container, args.record)
    updated: List[EvidenceRecord] = []
    for record in records:
        docs = container.documents_of(record)
        targets = [record]
        if args.structure or args.attester or args.scheme:
            config = scheme_from_args(args, default=record.kind)
            if needs_migration(record, config):
                targets = migrate_record(record, docs, config, session, args.batch)
                print(f"  ✓ {record.name}: migré vers {config.structure.value} + {config.attester.name}")
        for target in targets:
            renewed = renew_record(target, container.documents_of(target), session, args.force, args.endpoint)
            if renewed is None:
                print_record(target, session.inventory, marker="•")
                updated.append(target)
            else:
                print_record(renewed, session.inventory)
                updated.append(renewed)
    write_container(args.out or args.container, container.documents, replace_records(container, records, updated))
    return EXIT_OK


def cmd_migrate(args: argparse.Namespace) -> int:
    """Migre les preuves d'un conteneur vers une autre structure."""
    session = Session(args)
    container = open_container(args.container, session)
    records = select_records(container, args.record)
    config = scheme_from_args(args)
    migrated: List[EvidenceRecord] = []
    for record in records:
        result = migrate_record(record, container.documents_of(record), config, session, args.batch)
        for target in result:
            print_record(target, session.inventory)
        migrated.extend(result)
    write_container(args.out or args.container, container.documents, replace_records(container, records, migrated))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Vérifie les preuves d'un conteneur et affiche le tableau par document."""
    session = Session(args)
    try:
        container = read_container(args.container)
    except MopsError as exc:
        print(f"  ✗ {args.container}: {exc}")
        return EXIT_FAILED
    at = session.clock if args.clock else None
    valid = True
    writer = ReportWriter(args.out) if args.out else None
    for record in select_records(container, args.record):
        wanted = [name for name in args.document if name in record.state.document_names] or None
        if args.document and wanted is None:
            continue
        verdict = verify_proof(record, container.documents, session.inventory, at=at, documents=wanted)
        print(f"Preuve {record.name} ({record.kind.value})")
        verdict.print_table()
        valid = valid and verdict.valid
        if writer is not None:
            writer.write_verdict(verdict, record.name)
    return EXIT_OK if valid else EXIT_FAILED


def cmd_export(args: argparse.Namespace) -> int:
    """Exporte un dossier protégé sous forme de conteneur MoPS."""
    registry = ProtectionRegistry.in_directory(args.state_dir)
    folder = registry.folder(args.folder)
    container = read_container(folder.record_path)
    output = write_container(args.out or folder.name + CONTAINER_EXTENSION, container.documents, container.records)
    print(f"  ✓ {folder.name} exporté: {output}")
    return EXIT_OK


def _resolve_scheme(registry: ProtectionRegistry, name: str) -> Tuple[str, SchemeConfig]:
    """Clé du registre et schéma (un schéma connu est enregistré au passage)."""
    if name in registry.schemes:
        return name, registry.scheme(name)
    config = expert_preset(name)
    if config.name not in registry.schemes:
        registry.add_scheme(config.name, config)
    return config.name, config


def cmd_import(args: argparse.Namespace) -> int:
    """
    Importe un conteneur dans le système de protection: les preuves sont
    vérifiées, migrées vers le schéma du dossier si besoin et renouvelées;
    un conteneur sans preuve est protégé.
    """
    session = Session(args)
    registry = ProtectionRegistry.in_directory(args.state_dir)
    scheme_name, config = _resolve_scheme(registry, args.scheme)
    container = open_container(args.container, session)
    name = args.name or os.path.basename(args.container).replace(CONTAINER_EXTENSION, "")
    docs = list(container.documents)

    records: List[EvidenceRecord] = []
    if not container.records:
        attester = session.attester(config.attester, config.endpoint)
        h = session.initial_hash(args.hash or None, config.renewal_threshold)
        records.append(EvidenceRecord(name, protect(config.structure, docs, session.clock, h, attester, name),
                                      session.clock))
    for record in container.records:
        record_docs = container.documents_of(record)
        verdict = verify_proof(record, record_docs, session.inventory)
        if not verdict.valid:
            verdict.print_table()
            return EXIT_FAILED
        targets = (migrate_record(record, record_docs, config, session, config.attach_batches)
                   if needs_migration(record, config) else [record])
        for target in targets:
            renewed = renew_record(target, container.documents_of(target), session,
                                   endpoint=config.endpoint, threshold=config.renewal_threshold)
            records.append(renewed or target)

    path = write_container(os.path.join(args.state_dir, name + CONTAINER_EXTENSION), docs, records)
    validity = min(proof_validity(record.state, session.inventory) for record in records)
    registry.register_folder(name, scheme_name, path, [doc.name for doc in docs], validity)
    registry.save()
    for record in records:
        print_record(record, session.inventory)
    print(f"  ✓ {name} protégé par {scheme_name} ({path})")
    return EXIT_OK


def cmd_scheme(args: argparse.Namespace) -> int:
    """Schémas du système de protection: create, rename, delete, list."""
    registry = ProtectionRegistry.in_directory(args.state_dir)
    if args.action == "list":
        registry.print_summary()
        return EXIT_OK
    if args.action == "rename":
        if len(args.names) != 2:
            raise ValueError("rename attend l'ancien et le nouveau nom")
        registry.rename_scheme(*args.names)
    elif args.action == "delete":
        if len(args.names) != 1:
            raise ValueError("delete attend un nom de schéma")
        registry.delete_scheme(args.names[0])
    else:
        if len(args.names) != 1:
            raise ValueError("create attend un nom de schéma")
        if args.retrieval and args.storage and args.trust:
            config = wizard_select(WizardAnswers(Retrieval(args.retrieval), Storage(args.storage),
                                                 Trust(args.trust)))
        else:
            config = scheme_from_args(args)
        registry.add_scheme(args.names[0], config)
        print(f"  ✓ {args.names[0]}: {config}")
    registry.save()
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulation sur ``--years`` ans (100 par défaut) d'une ou de toutes les structures."""
    inventory = load_inventory(args.inventory) if args.inventory else None
    kinds = [args.structure] if args.structure else list(StructureKind)
    reports = []
    for kind in kinds:
        report = simulate(kind, args.years, args.seed, inventory)
        report.print_summary()
        reports.append(report)
    writer = ReportWriter(args.out or "output")
    writer.write_simulation_summary(reports)
    writer.write_detailed_report(reports)
    print(f"✓ Rapports écrits dans '{writer.output_dir}'")
    return EXIT_OK if all(report.valid for report in reports) else EXIT_FAILED


def cmd_inventory(args: argparse.Namespace) -> int:
    """Affiche l'inventaire de sécurité et l'enregistre avec ``--out``."""
    inventory = load_inventory(args.inventory) if args.inventory else default_lenstra_inventory()
    inventory.print_table()
    if args.out:
        print(f"  ✓ Inventaire écrit: {save_inventory(inventory, args.out)}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    """Expose un fournisseur (tsa, na, info, storage) sur ``--endpoint``."""
    inventory = load_inventory(args.inventory) if args.inventory else None
    host = ServiceHost(FixturePki(args.seed, SIMULATION_START), inventory, args.storage_dir)
    print(f"Service {args.service} sur {args.endpoint} (Ctrl+C pour arrêter)")
    try:
        serve(args.endpoint, host, args.service)
    except KeyboardInterrupt:
        print("\nArrêt du service")
    return EXIT_OK


# =============================================================================
# Ligne de commande
# =============================================================================

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--clock", help="Date simulée ISO-8601 (défaut: maintenant)")
    parser.add_argument("--seed", type=int, default=1, help="Graine de la PKI et des documents")
    parser.add_argument("--inventory", help="Fichier d'inventaire de sécurité")
    parser.add_argument("--verbose", "-v", action="store_true", help="Journalisation détaillée")


def _add_scheme(parser: argparse.ArgumentParser):
    parser.add_argument("--structure", type=StructureKind.parse, help="AS, MTS, MDS, SLS ou NAW")
    parser.add_argument("--attester", type=IssuerKind.parse, help="TSA ou NA")
    parser.add_argument("--hash", type=HashFunctionId.parse, help="SHA-256, SHA-384 ou SHA-512")
    parser.add_argument("--endpoint", help="Service d'attestation distant hôte:port")
    parser.add_argument("--scheme", help="Schéma connu: AdES, ERS, CIS, CISS ou AC")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mops", description="Preuves d'existence à long terme")
    commands = parser.add_subparsers(dest="command", required=True)

    sign = commands.add_parser("sign", help="Signer des fichiers")
    sign.add_argument("files", nargs="+")
    sign.add_argument("--out", help="Dossier des conteneurs créés")
    _add_common(sign)
    sign.set_defaults(func=cmd_sign)

    prot = commands.add_parser("protect", help="Protéger des documents signés")
    prot.add_argument("containers", nargs="+")
    prot.add_argument("--name", help="Nom du dossier protégé")
    prot.add_argument("--out", help="Conteneur produit")
    _add_scheme(prot)
    _add_common(prot)
    prot.set_defaults(func=cmd_protect)

    add = commands.add_parser("add", help="Ajouter des documents à une MDS ou une SLS")
    add.add_argument("container")
    add.add_argument("documents", nargs="+", help="Conteneurs des documents signés")
    add.add_argument("--record", help="Preuve visée")
    add.add_argument("--hash", type=HashFunctionId.parse)
    add.add_argument("--endpoint")
    add.add_argument("--out")
    _add_common(add)
    add.set_defaults(func=cmd_add)

    for name, func, text in (("renew", cmd_renew, "Mettre à jour (migrer, renouveler) des preuves"),
                             ("migrate", cmd_migrate, "Migrer des preuves")):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("container")
        sub.add_argument("--record", help="Preuve visée")
        sub.add_argument("--batch", action="store_true", help="Un seul NAW pour tous les documents")
        sub.add_argument("--out")
        if name == "renew":
            sub.add_argument("--force", action="store_true", help="Renouveler même si rien n'est dû")
        _add_scheme(sub)
        _add_common(sub)
        sub.set_defaults(func=func)

    verify = commands.add_parser("verify", help="Vérifier un conteneur")
    verify.add_argument("container")
    verify.add_argument("--record")
    verify.add_argument("--document", action="append", default=[], help="Document à vérifier")
    verify.add_argument("--out", help="Dossier des verdicts JSON")
    _add_common(verify)
    verify.set_defaults(func=cmd_verify)

    export = commands.add_parser("export", help="Exporter un dossier protégé")
    export.add_argument("folder")
    export.add_argument("--out")
    export.add_argument("--state-dir", default=DEFAULT_STATE_DIR)
    _add_common(export)
    export.set_defaults(func=cmd_export)

    imp = commands.add_parser("import", help="Importer un conteneur dans le système de protection")
    imp.add_argument("container")
    imp.add_argument("--scheme", required=True, help="Schéma du registre ou schéma connu")
    imp.add_argument("--name")
    imp.add_argument("--hash", type=HashFunctionId.parse)
    imp.add_argument("--state-dir", default=DEFAULT_STATE_DIR)
    _add_common(imp)
    imp.set_defaults(func=cmd_import)

    scheme = commands.add_parser("scheme", help="Gérer les schémas de protection")
    scheme.add_argument("action", choices=("create", "rename", "delete", "list"))
    scheme.add_argument("names", nargs="*")
    scheme.add_argument("--retrieval", choices=[r.value for r in Retrieval])
    scheme.add_argument("--storage", choices=[s.value for s in Storage])
    scheme.add_argument("--trust", choices=[t.value for t in Trust])
    scheme.add_argument("--state-dir", default=DEFAULT_STATE_DIR)
    _add_scheme(scheme)
    _add_common(scheme)
    scheme.set_defaults(func=cmd_scheme)

    sim = commands.add_parser("simulate", help="Simulation sur 100 ans")
    sim.add_argument("--structure", type=StructureKind.parse, help="Toutes les structures par défaut")
    sim.add_argument("--years", type=int, default=SIMULATION_YEARS)
    sim.add_argument("--out", help="Dossier des rapports (défaut: output)")
    _add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    inv = commands.add_parser("inventory", help="Afficher ou enregistrer l'inventaire de sécurité")
    inv.add_argument("--out")
    _add_common(inv)
    inv.set_defaults(func=cmd_inventory)

    srv = commands.add_parser("serve", help="Exposer un service")
    srv.add_argument("--service", choices=ENDPOINTS, required=True)
    srv.add_argument("--endpoint", required=True, help="Adresse d'écoute hôte:port")
    srv.add_argument("--storage-dir", default="storage")
    _add_common(srv)
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Fonction principale du programme.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    print_header()
    try:
        code = args.func(args)
    except SERVICE_ERRORS as exc:
        print(f"\n✗ Erreur de service: {exc}")
        return EXIT_SERVICE
    except IncompatibleAttester as exc:
        print(f"\n✗ Combinaison refusée: {exc}")
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"\n✗ {exc}")
        return EXIT_USAGE
    except MopsError as exc:
        print(f"\n✗ Opération refusée ({exc.code}): {exc}")
        return EXIT_FAILED
    if code == EXIT_OK:
        print_footer()
    return code


if __name__ == "__main__":
    sys.exit(main())
