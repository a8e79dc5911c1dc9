"""
Octets attestés par chaque entrée d'une structure de preuve.

La construction et la vérification calculent les octets attestés avec les
mêmes fonctions: une entrée est d'abord préparée (élément protégé, arbres,
chemins, liens), puis ses octets sont calculés à partir de l'état et des
documents disponibles, enfin l'attestation est demandée sur leur empreinte.

Notation (``||`` = concaténation préfixée de longueur, A_j / V_j = encodages
de l'attestation et des données de vérification de l'entrée j):

    AS   init                 H_0 || H_0(d)
         renouvellement       H_n || H_n(A_{n-1} || V_{n-1})
         hachage              H_n || H_n(d || A_0 || V_0 || ... || A_{n-1} || V_{n-1})
    MTS  init                 H_0 || r_0
         hachage              H_n || r_k || H_n(A_0 || V_0 || ...)
    MDS  ajout                H_n || H_n(H_n(d_n) || A_{n-1} || V_{n-1})
         hachage + ajout      H_n || r_k || H_n(d_n)
         hachage sans ajout   H_n || r_k
         lot, hachage         H_n || H_n(H_n(d_n) || r_k)
    SLS  élément              H_n || e_n,  e_n = H_n(H_n(d_n) || lien_0 || ... || lien_L)
         hachage              H_n || r_k || e_n
    NAW                       H_0 || H_0(d) || ... || H_n || H_n(d) || c

Une entrée issue d'un cumul de requêtes atteste ``H || racine`` où la racine
est recalculée à partir des octets ci-dessus et du chemin partagé.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from models.auth_path import AuthPath
from models.document import InputData
from models.encoding import concat, concat_all
from models.errors import MissingDocument, RecordFormatError
from models.evidence import (
    BatchTree, ChainEntry, EntryKind, MigrationMode, ProofState, ProtectedItem, StructureKind,
)
from models.primitives import HashFunctionId
from models.verdict import Diagnostic, DiagnosticCategory

from .attestation import cumulated_notarial_leaf, notarial_payload
from .crypto_core import hash_bytes
from .merkle import MerkleTree, path_matches, recompute_root


@dataclass
class DocumentContext:
    """
    Documents disponibles pour le calcul des octets attestés.

    Attributes:
        documents (Dict[str, InputData]): Documents par nom
        focus (Optional[str]): Document à privilégier pour recalculer les
            racines (celui en cours de vérification)
        mismatches (List[Diagnostic]): Racines recalculées différentes des
            racines enregistrées
    """

    documents: Dict[str, InputData] = field(default_factory=dict)
    focus: Optional[str] = None
    mismatches: List[Diagnostic] = field(default_factory=list)

    @classmethod
    def of(cls, docs: Iterable[InputData] = (), focus: Optional[str] = None) -> "DocumentContext":
        return cls({doc.name: doc for doc in docs}, focus)

    def has(self, name: str) -> bool:
        return name in self.documents

    def document(self, name: str) -> InputData:
        try:
            return self.documents[name]
        except KeyError:
            raise MissingDocument(f"Document manquant: {name}") from None

    def mismatch(self, message: str):
        self.mismatches.append(Diagnostic(DiagnosticCategory.PATH_MISMATCH, message, self.focus))


def trailing_zeros(index: int) -> int:
    """Nombre de bits de poids faible nuls (hauteur d'un élément SLS)."""
    if index <= 0:
        return 0
    return (index & -index).bit_length() - 1


def entry_pair(entry: ChainEntry) -> bytes:
    """A_j || V_j"""
    return concat(entry.attestation.encode(), entry.verification_data.encode())


# =============================================================================
# Éléments protégés
# =============================================================================

def leaf_bytes(state: ProofState, item: ProtectedItem, leaf: str, ctx: DocumentContext) -> bytes:
    """
    Octets d'une feuille d'un élément protégé.

    - document: D || s
    - migration d'une preuve de document unique: a_n || v_n de la source
    - migration de plusieurs documents: (D || s) || preuve source
    """
    if item.receipt is None:
        return ctx.document(leaf).encode()
    receipt = state.receipts[item.receipt]
    source = receipt.source_record
    if source is None:
        return ctx.document(leaf).encode()
    if receipt.mode == MigrationMode.SINGLE:
        return entry_pair(source.state.last_entry)
    return concat(ctx.document(leaf).encode(), source.encode())


def _leaf_available(state: ProofState, item: ProtectedItem, leaf: str, ctx: DocumentContext) -> bool:
    if item.receipt is not None and state.receipts[item.receipt].mode == MigrationMode.SINGLE:
        return True
    return ctx.has(leaf)


def _pick_leaf(state: ProofState, item: ProtectedItem, ctx: DocumentContext) -> str:
    if ctx.focus in item.leaves and _leaf_available(state, item, ctx.focus, ctx):
        return ctx.focus
    for leaf in item.leaves:
        if _leaf_available(state, item, leaf, ctx):
            return leaf
    raise MissingDocument(f"Aucun document disponible pour {item.name}")


def build_batch_tree(state: ProofState, item: ProtectedItem, hash_fn: HashFunctionId,
                     ctx: DocumentContext) -> BatchTree:
    """Arbre d'un lot sous ``hash_fn`` (tous les documents du lot requis)."""
    tree = MerkleTree(hash_fn, [leaf_bytes(state, item, leaf, ctx) for leaf in item.leaves])
    return BatchTree(hash_fn, tree.root,
                     tuple((leaf, tree.auth_path(i)) for i, leaf in enumerate(item.leaves)))


def item_bytes(state: ProofState, index: int, hash_fn: HashFunctionId, ctx: DocumentContext) -> bytes:
    """
    Octets ``d`` d'un élément protégé sous ``hash_fn``: la feuille d'un
    document seul, la racine du lot sous ``hash_fn`` pour un lot.
    """
    item = state.items[index]
    if not item.batch:
        return leaf_bytes(state, item, item.leaves[0], ctx)
    tree = item.batch_tree(hash_fn)
    if tree is None:
        raise RecordFormatError(f"Lot {item.name} sans arbre {hash_fn}", section="BatchTree")
    leaf = _pick_leaf(state, item, ctx)
    path = tree.path_of(leaf)
    if path is None:
        raise RecordFormatError(f"Feuille {leaf} absente du lot {item.name}", section="BatchTree")
    if not path_matches(path, item.leaves.index(leaf), len(item.leaves)):
        ctx.mismatch(f"chemin de {leaf} incohérent dans le lot {item.name}")
    root = recompute_root(leaf_bytes(state, item, leaf, ctx), path)
    if root != tree.root:
        ctx.mismatch(f"racine du lot {item.name} ({hash_fn}) différente")
    return root


def item_digest(state: ProofState, index: int, hash_fn: HashFunctionId, ctx: DocumentContext) -> bytes:
    """H(d) d'un élément protégé."""
    return hash_bytes(hash_fn, item_bytes(state, index, hash_fn, ctx))


# =============================================================================
# Arbres de la structure
# =============================================================================

def _tree_hash(state: ProofState, tree: int) -> HashFunctionId:
    if tree >= len(state.trees):
        raise RecordFormatError(f"Arbre {tree} absent", section="Trees")
    return state.trees[tree].hash_fn


def mts_leaf(state: ProofState, index: int, tree: int, ctx: DocumentContext,
             hash_fn: Optional[HashFunctionId] = None) -> bytes:
    """d_i || p_{i,0} || ... || p_{i,k-1}"""
    item = state.items[index]
    hash_fn = hash_fn or _tree_hash(state, tree)
    base = item_bytes(state, index, hash_fn, ctx)
    if tree == 0:
        return base
    earlier = []
    for k in range(tree):
        path = item.path_in(k)
        if path is None:
            raise RecordFormatError(f"{item.name}: chemin {k} absent", section="Paths")
        earlier.append(path.encode())
    return concat_all([base] + earlier)


def _focus_item(state: ProofState, ctx: DocumentContext) -> int:
    if ctx.focus is not None:
        for index, _ in state.items_for_document(ctx.focus):
            return index
    for index, item in enumerate(state.items):
        try:
            _pick_leaf(state, item, ctx)
            return index
        except MissingDocument:
            continue
    raise MissingDocument("Aucun document disponible pour recalculer la racine")


def mts_root(state: ProofState, tree: int, ctx: DocumentContext) -> bytes:
    index = _focus_item(state, ctx)
    item = state.items[index]
    path = item.path_in(tree)
    if path is None:
        raise RecordFormatError(f"{item.name}: chemin {tree} absent", section="Paths")
    if not path_matches(path, index, state.trees[tree].size):
        ctx.mismatch(f"chemin de {item.name} incohérent dans l'arbre {tree}")
    root = recompute_root(mts_leaf(state, index, tree, ctx), path)
    if root != state.trees[tree].root:
        ctx.mismatch(f"racine de l'arbre {tree} différente")
    return root


def element_leaf(state: ProofState, element: int, tree: int, ctx: DocumentContext,
                 hash_fn: Optional[HashFunctionId] = None) -> bytes:
    """d_e || A_e || V_e || liens_e || chemins de e dans les arbres précédents"""
    entry = state.entries[element]
    hash_fn = hash_fn or _tree_hash(state, tree)
    document = b"" if entry.item is None else item_bytes(state, entry.item, hash_fn, ctx)
    earlier = [path.encode() for path in entry.paths_before(tree)]
    return concat_all([document, entry.attestation.encode(), entry.verification_data.encode(),
                       concat_all(entry.links)] + earlier)


def element_root(state: ProofState, tree: int, element: Optional[int], ctx: DocumentContext) -> bytes:
    """
    Racine de l'arbre ``tree`` recalculée depuis l'élément ``element``; la
    racine enregistrée est utilisée quand aucun élément n'est désigné.
    """
    record = state.trees[tree] if tree < len(state.trees) else None
    if record is None:
        raise RecordFormatError(f"Arbre {tree} absent", section="Trees")
    if element is None:
        return record.root
    path = state.entries[element].path_in(tree)
    if path is None:
        raise RecordFormatError(f"Élément {element}: chemin {tree} absent", section="Paths")
    if not path_matches(path, element, record.size):
        ctx.mismatch(f"chemin de l'élément {element} incohérent dans l'arbre {tree}")
    root = recompute_root(element_leaf(state, element, tree, ctx), path)
    if root != record.root:
        ctx.mismatch(f"racine de l'arbre {tree} différente (élément {element})")
    return root


def sls_link(state: ProofState, target: int, hash_fn: HashFunctionId) -> bytes:
    """Lien vers l'élément ``target``: H(A_target || V_target)"""
    return hash_bytes(hash_fn, entry_pair(state.entries[target]))


def sls_links(state: ProofState, index: int, hash_fn: HashFunctionId) -> tuple:
    """Liens des niveaux 0..L de l'élément ``index`` (L = zéros de poids faible)."""
    if index == 0:
        return ()
    return tuple(sls_link(state, index - (1 << level), hash_fn)
                 for level in range(trailing_zeros(index) + 1))


def element_digest(entry: ChainEntry) -> bytes:
    """e_n = H_n(H_n(d_n) || lien_0 || ... || lien_L)"""
    return hash_bytes(entry.hash_fn, concat_all([entry.item_digest or b""] + list(entry.links)))


# =============================================================================
# Octets attestés
# =============================================================================

def _previous_chain(state: ProofState, index: int) -> bytes:
    return concat_all(part for entry in state.entries[:index]
                      for part in (entry.attestation.encode(), entry.verification_data.encode()))


def member_bytes(state: ProofState, index: int, ctx: DocumentContext,
                 previous: Optional[int] = None) -> bytes:
    """
    Octets qu'attesterait l'entrée ``index`` seule.

    Args:
        state (ProofState): État contenant l'entrée (éventuellement en préparation)
        index (int): Index de l'entrée
        ctx (DocumentContext): Documents disponibles
        previous (Optional[int]): Élément depuis lequel les racines des
            arbres de renouvellement sont recalculées (MDS, SLS)
    """
    entry = state.entries[index]
    hash_fn = entry.hash_fn
    head = hash_fn.encode()
    kind = state.kind
    step = entry.kind

    def h(data: bytes) -> bytes:
        return hash_bytes(hash_fn, data)

    if kind is StructureKind.NAW:
        notarial = state.notarial
        return notarial_payload(notarial.history, notarial.certificate)

    if step is EntryKind.INIT and kind is not StructureKind.MTS:
        return concat(head, entry.item_digest)
    if step is EntryKind.RENEWAL and kind is not StructureKind.SLS:
        return concat(head, h(entry_pair(state.entries[index - 1])))

    if kind is StructureKind.AS:
        if step is EntryKind.HASH_RENEWAL:
            item_index = entry.item if entry.item is not None else 0
            document = item_bytes(state, item_index, hash_fn, ctx)
            return concat(head, h(concat(document) + _previous_chain(state, index)))
    elif kind is StructureKind.MTS:
        if step is EntryKind.INIT:
            return concat(head, mts_root(state, entry.tree, ctx))
        if step is EntryKind.HASH_RENEWAL:
            return concat(head, mts_root(state, entry.tree, ctx), h(_previous_chain(state, index)))
    elif kind is StructureKind.MDS:
        if step is EntryKind.ADD:
            return concat(head, h(concat(entry.item_digest, *_pair_operands(state, index - 1))))
        root = element_root(state, entry.tree, previous, ctx) if entry.tree is not None else None
        if step is EntryKind.HASH_RENEWAL:
            return concat(head, root)
        if step is EntryKind.ADD_HASH_RENEWAL:
            return concat(head, root, entry.item_digest)
        if step is EntryKind.ATTACH_HASH_RENEWAL:
            return concat(head, h(concat(entry.item_digest, root)))
    elif kind is StructureKind.SLS:
        if step in (EntryKind.ADD, EntryKind.RENEWAL):
            return concat(head, element_digest(entry))
        if step in (EntryKind.HASH_RENEWAL, EntryKind.ADD_HASH_RENEWAL):
            root = element_root(state, entry.tree, previous, ctx)
            return concat(head, root, element_digest(entry))
    raise RecordFormatError(f"Entrée {index}: {step.value} impossible pour {kind.value}",
                            section="Entries", position=str(index))


def _pair_operands(state: ProofState, index: int) -> Sequence[bytes]:
    entry = state.entries[index]
    return entry.attestation.encode(), entry.verification_data.encode()


def cumulation_leaf(state: ProofState, index: int, ctx: DocumentContext,
                    previous: Optional[int] = None) -> bytes:
    """Feuille de l'entrée dans un arbre cumulé."""
    if state.kind is StructureKind.NAW:
        notarial = state.notarial
        return cumulated_notarial_leaf(notarial.history, notarial.certificate, notarial.original_time)
    return member_bytes(state, index, ctx, previous)


def shared_root(leaf: bytes, path: AuthPath, ctx: Optional[DocumentContext] = None) -> bytes:
    if ctx is not None and not path_matches(path):
        ctx.mismatch(f"chemin partagé incohérent (feuille {path.leaf_index})")
    return recompute_root(leaf, path)


def attested_bytes(state: ProofState, index: int, ctx: DocumentContext,
                   previous: Optional[int] = None) -> bytes:
    """Octets effectivement attestés par l'entrée ``index``."""
    entry = state.entries[index]
    if entry.shared is None:
        return member_bytes(state, index, ctx, previous)
    leaf = cumulation_leaf(state, index, ctx, previous)
    return concat(entry.hash_fn.encode(), shared_root(leaf, entry.shared.path, ctx))
