"""
Module models - Types de valeur des preuves d'existence à long terme.
"""

from .time_instant import TimeInstant, DAY, YEAR
from .primitives import HashFunctionId, SignatureParams, KeyPair, PAIRED_KEY_BITS
from .certificate import Certificate, CertificateRef, Crl
from .document import DocumentSignature, InputData
from .auth_path import AuthPath, Side
from .attestation import Attestation, AttestRequest, IssuerKind, NaExtras, VerificationData
from .evidence import (
    BatchTree, ChainEntry, EntryKind, EvidenceRecord, MigrationMode, MigrationReceipt,
    NotarialState, ProofState, ProtectedItem, SharedProof, StructureKind, TreeRecord,
)
from .verdict import Diagnostic, DiagnosticCategory, DocumentVerdict, Verdict
from .simulation_report import SimulationReport

__all__ = [
    'TimeInstant', 'DAY', 'YEAR',
    'HashFunctionId', 'SignatureParams', 'KeyPair', 'PAIRED_KEY_BITS',
    'Certificate', 'CertificateRef', 'Crl',
    'DocumentSignature', 'InputData',
    'AuthPath', 'Side',
    'Attestation', 'AttestRequest', 'IssuerKind', 'NaExtras', 'VerificationData',
    'BatchTree', 'ChainEntry', 'EntryKind', 'EvidenceRecord', 'MigrationMode',
    'MigrationReceipt', 'NotarialState', 'ProofState', 'ProtectedItem', 'SharedProof',
    'StructureKind', 'TreeRecord',
    'Diagnostic', 'DiagnosticCategory', 'DocumentVerdict', 'Verdict',
    'SimulationReport',
]
