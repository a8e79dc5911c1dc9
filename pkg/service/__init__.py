"""
Module service - Protocole de service, fournisseurs derrière des points
d'accès (TSA, NA, information, stockage) et clients distants.
"""

from .protocol import MessageKind, ServiceMessage, read_message, write_message
from .storage import LocalFolderStorage, storage_get, storage_put
from .server import (
    ENDPOINTS, INFO_ENDPOINT, NA_ENDPOINT, STORAGE_ENDPOINT, TSA_ENDPOINT, ServiceHost, ServiceServer,
    dispatch, parse_address, serve,
)
from .client import (
    LoopbackTransport, RemoteInformationService, RemoteNa, RemoteStorage, RemoteTsa, ServiceClient,
    SocketTransport, Transport, connect, remote_attester,
)

__all__ = [
    'MessageKind', 'ServiceMessage', 'read_message', 'write_message',
    'LocalFolderStorage', 'storage_get', 'storage_put',
    'ENDPOINTS', 'INFO_ENDPOINT', 'NA_ENDPOINT', 'STORAGE_ENDPOINT', 'TSA_ENDPOINT', 'ServiceHost',
    'ServiceServer', 'dispatch', 'parse_address', 'serve',
    'LoopbackTransport', 'RemoteInformationService', 'RemoteNa', 'RemoteStorage', 'RemoteTsa',
    'ServiceClient', 'SocketTransport', 'Transport', 'connect', 'remote_attester',
]
