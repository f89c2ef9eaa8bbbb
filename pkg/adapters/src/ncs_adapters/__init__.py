"""Neural-annotator wrappers emitting the ncskit JSON-lines interchange."""

from .backends import CorefBackend, GroundingBackend, RelationBackend, TopicBackend
from .interchange import dumps_record, read_records, segment_texts, write_records
from .manifest import AdapterManifest, AdapterRunError, content_hash
from .runner import main, run_coref, run_grounding, run_relations, run_topics

__version__ = "0.1.0"
