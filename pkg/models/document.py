"""
Documents signés: données d'entrée des structures de preuve.

Une donnée d'entrée ``d = D || s`` associe un document ``D`` à sa signature
détachée ``s``. La signature contient uniquement l'identifiant de la
méthode, l'empreinte du document, la date de signature, le certificat du
signataire et la valeur de signature sur ces propriétés.
"""

from dataclasses import dataclass, field

from .certificate import Certificate
from .encoding import concat, text
from .primitives import HashFunctionId, SignatureParams
from .time_instant import TimeInstant


def method_id_for(hash_fn: HashFunctionId, params: SignatureParams) -> str:
    """Identifiant de méthode, ex: ``SHA-256withSIM-RSA-2048``."""
    return f"{hash_fn.value}with{params.name}"


@dataclass(frozen=True)
class DocumentSignature:
    """
    Signature détachée d'un document.

    Attributes:
        method_id (str): Méthode de signature (hachage + schéma)
        doc_digest (bytes): Empreinte du document signé
        signing_time (TimeInstant): Date de signature
        signer_cert (Certificate): Certificat du signataire
        signature_value (bytes): Signature sur les champs précédents
    """

    method_id: str
    doc_digest: bytes = field(repr=False)
    signing_time: TimeInstant
    signer_cert: Certificate = field(repr=False)
    signature_value: bytes = field(default=b"", repr=False)

    @property
    def hash_fn(self) -> HashFunctionId:
        return HashFunctionId.parse(self.method_id.split("with", 1)[0])

    def tbs_bytes(self) -> bytes:
        return concat(
            text(self.method_id),
            self.doc_digest,
            self.signing_time.encode(),
            self.signer_cert.encode(),
        )

    def encode(self) -> bytes:
        return concat(self.tbs_bytes(), self.signature_value)


@dataclass(frozen=True)
class InputData:
    """
    Document signé à protéger.

    Attributes:
        name (str): Nom du document (ex: ``radio_2016.pdf``)
        document (bytes): Contenu du document
        signature (DocumentSignature): Signature détachée
    """

    name: str
    document: bytes = field(repr=False)
    signature: DocumentSignature = field(repr=False)

    def encode(self) -> bytes:
        """Octets ``D || s`` hachés par les structures de preuve."""
        return concat(self.document, self.signature.encode())

    @property
    def size(self) -> int:
        return len(self.document)

    def __str__(self) -> str:
        return f"{self.name} ({self.size} octets, signé le {self.signature.signing_time})"
