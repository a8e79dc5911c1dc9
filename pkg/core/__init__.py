"""
Module core - Primitives, fournisseurs d'attestation, structures de preuve,
vérification, combinaison et migration.

Le pilote de simulation (``core.simulation``) s'importe explicitement: il
dépend de ``data_io``.
"""

from .crypto_core import (
    CertificateAuthority, FixturePki, IssuedLeaf, chain_valid, encode_certificate, encode_crl,
    hash_bytes, keygen, sign, sign_document, verify, verify_document,
)
from .security_inventory import (
    InventoryEntry, Primitive, SecurityInventory, default_lenstra_inventory, secure_at,
    select_hash, update_entry, validity_estimate,
)
from .merkle import MerkleTree, auth_path, build, recompute_root
from .attestation import (
    Attester, NotarialAuthority, TimestampAuthority, na_attest_init, na_attest_renew, tsa_attest,
    verify_attestation,
)
from .structures import (
    append_element, as_init, as_renew, mds_add_renew, mds_hash_renew, mds_init, mds_renew,
    mts_init, mts_renew, sls_add_renew, sls_hash_renew, sls_init, sls_renew,
)
from .notarial_wrapper import naw_init, naw_init_batch, naw_renew
from .verification import sls_verify, verify_proof
from .renewal import RENEWAL_THRESHOLD, add_document, needs_renewal, protect, renew, renew_if_due
from .combination import BatchCoordinator, attach_docset, cumulate_attest, cumulate_renew
from .migration import migrate_to_naw, migrate_to_sequence, na_attest_migrate, naw_records
from .scheme import (
    Retrieval, SchemeConfig, Storage, Trust, WizardAnswers, all_answers, expert_preset,
    wizard_select,
)

__all__ = [
    'CertificateAuthority', 'FixturePki', 'IssuedLeaf', 'chain_valid', 'encode_certificate',
    'encode_crl', 'hash_bytes', 'keygen',
    'sign', 'sign_document', 'verify', 'verify_document',
    'InventoryEntry', 'Primitive', 'SecurityInventory', 'default_lenstra_inventory',
    'secure_at', 'select_hash', 'update_entry', 'validity_estimate',
    'MerkleTree', 'auth_path', 'build', 'recompute_root',
    'Attester', 'NotarialAuthority', 'TimestampAuthority', 'na_attest_init', 'na_attest_renew',
    'tsa_attest', 'verify_attestation',
    'append_element', 'as_init', 'as_renew', 'mds_add_renew', 'mds_hash_renew', 'mds_init',
    'mds_renew', 'mts_init', 'mts_renew', 'sls_add_renew', 'sls_hash_renew', 'sls_init',
    'sls_renew',
    'naw_init', 'naw_init_batch', 'naw_renew',
    'sls_verify', 'verify_proof',
    'RENEWAL_THRESHOLD', 'add_document', 'needs_renewal', 'protect', 'renew', 'renew_if_due',
    'BatchCoordinator', 'attach_docset', 'cumulate_attest', 'cumulate_renew',
    'migrate_to_naw', 'migrate_to_sequence', 'na_attest_migrate', 'naw_records',
    'Retrieval', 'SchemeConfig', 'Storage', 'Trust', 'WizardAnswers', 'all_answers',
    'expert_preset', 'wizard_select',
]
