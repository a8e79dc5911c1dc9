"""
Module data_io - Entrées/sorties: preuves XML, conteneurs MoPS, inventaire,
rapports, documents de test et registre de protection.
"""

from .evidence_xml import (
    RECORD_EXTENSION, SIGNATURE_EXTENSION, parse_record, parse_signature, read_record,
    serialize_record, serialize_signature, write_record,
)
from .container import (
    CONTAINER_EXTENSION, MopsContainer, export_container, import_container, read_container,
    write_container,
)
from .inventory_file import format_inventory, load_inventory, parse_inventory, save_inventory
from .document_generator import DocumentGenerator
from .report_writer import ReportWriter
from .protection_registry import ProtectedFolder, ProtectionRegistry

__all__ = [
    'RECORD_EXTENSION', 'SIGNATURE_EXTENSION', 'parse_record', 'parse_signature', 'read_record',
    'serialize_record', 'serialize_signature', 'write_record',
    'CONTAINER_EXTENSION', 'MopsContainer', 'export_container', 'import_container',
    'read_container', 'write_container',
    'format_inventory', 'load_inventory', 'parse_inventory', 'save_inventory',
    'DocumentGenerator',
    'ReportWriter',
    'ProtectedFolder', 'ProtectionRegistry',
]
