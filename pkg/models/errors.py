"""
Hiérarchie d'exceptions du système de protection.

Toutes les erreurs dérivent de ``MopsError``. Les violations de
préconditions (entrées invalides) dérivent aussi de ``ValueError`` afin de
rester compatibles avec le code appelant qui attrape les erreurs de saisie.

Les refus de l'autorité notariale (branches « Abort ») sont des sous-classes
de ``NotaryAbort`` et exposent l'attribut ``check`` nommant la vérification
qui a échoué.
"""


class MopsError(Exception):
    """Erreur de base de toutes les opérations."""

    #: Code stable transmis sur le fil (par défaut le nom de la classe)
    code = "mops-error"

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


# --- crypto_core ------------------------------------------------------------

class UnsupportedKeyLength(MopsError, ValueError):
    code = "unsupported-key-length"


class PairingViolation(MopsError, ValueError):
    code = "pairing-violation"


class CertificateExpired(MopsError, ValueError):
    """L'autorité émettrice n'est pas valide à la date demandée."""
    code = "issuer-expired"


class UnknownSerial(MopsError, ValueError):
    code = "unknown-serial"


class MissingCrl(MopsError, ValueError):
    code = "missing-crl"


# --- security_inventory -----------------------------------------------------

class UnknownPrimitive(MopsError, ValueError):
    code = "unknown-primitive"


class LifetimeExtension(MopsError, ValueError):
    """Une mise à jour tenterait de prolonger une durée de sécurité."""
    code = "lifetime-extension"


# --- merkle -----------------------------------------------------------------

class EmptyLeafList(MopsError, ValueError):
    code = "empty-leaf-list"


class LeafIndexOutOfRange(MopsError, ValueError):
    code = "leaf-index-out-of-range"


# --- attestation ------------------------------------------------------------

class TsaCertificateExpired(MopsError):
    code = "tsa-certificate-expired"


class UnknownIssuer(MopsError, ValueError):
    code = "unknown-issuer"


class NotaryAbort(MopsError):
    """Refus de l'autorité notariale; aucune attestation n'est émise."""
    code = "notary-abort"
    check = "abort"


class CertificateInvalid(NotaryAbort):
    code = "cert-invalid"
    check = "certificate"


class HashInsecure(NotaryAbort):
    code = "hash-insecure"
    check = "hash"


class OldHashInsecure(NotaryAbort):
    code = "old-hash-insecure"
    check = "previous-hash"


class PriorAttestationInvalid(NotaryAbort):
    code = "prior-attestation-invalid"
    check = "prior-attestation"


# --- proof_structures / combine_migrate -------------------------------------

class IncompatibleAttester(MopsError, ValueError):
    code = "incompatible"


class RenewalWindowMissed(MopsError):
    code = "renewal-window-missed"


class MixedHashFunctions(MopsError, ValueError):
    code = "mixed-hash-functions"


class MigrationRefused(MopsError):
    code = "migration-refused"


class MissingDocument(MopsError, ValueError):
    code = "missing-document"


# --- evidence_format --------------------------------------------------------

class RecordFormatError(MopsError, ValueError):
    """
    Enregistrement de preuve illisible ou non conforme au schéma.

    Attributes:
        section (str): Section manquante ou fautive (ex: ``Entries``)
        position (str): Position dans le document (ligne ou chemin)
    """
    code = "record-format"

    def __init__(self, message: str, section: str = "", position: str = ""):
        super().__init__(message)
        self.section = section
        self.position = position


class ContainerError(MopsError, ValueError):
    code = "container"


# --- service_harness --------------------------------------------------------

class UnknownHandle(MopsError, KeyError):
    code = "unknown-handle"

    def __str__(self) -> str:
        return self.message


class StorageFailure(MopsError):
    code = "storage-failure"


class MalformedMessage(MopsError, ValueError):
    code = "malformed-message"


class UnknownEndpoint(MopsError, ValueError):
    code = "unknown-endpoint"


class ServiceError(MopsError):
    """
    Erreur renvoyée par un service distant sans équivalent local.

    Attributes:
        remote_code (str): Code d'erreur transmis par le service
    """
    code = "service-error"

    def __init__(self, message: str, remote_code: str = ""):
        super().__init__(message)
        self.remote_code = remote_code


def error_class_for_code(code: str):
    """
    Retrouve la classe d'exception correspondant à un code transmis.

    Args:
        code (str): Code stable (attribut ``code`` d'une sous-classe)

    Returns:
        type: La classe trouvée, ou None
    """
    stack = [MopsError]
    while stack:
        cls = stack.pop()
        if cls.code == code:
            return cls
        stack.extend(cls.__subclasses__())
    return None
