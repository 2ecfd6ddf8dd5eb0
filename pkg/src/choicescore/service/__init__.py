from .core import LabelerSession, Study, StudyService

__all__ = ["Study", "LabelerSession", "StudyService"]
