import json
import logging

from pathlib import Path
from typing import Any, Optional

from django.conf import settings


logger = logging.getLogger(__name__)


def dump_json(payload: Any) -> str:
    """Детерминированная запись: один и тот же объект дает одни и те же байты."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, default=str) + '\n'


class BaseRepo:
    """
    Хранилище JSON-артефактов одного вида: по файлу на ключ в каталоге kind.

    Каждый артефакт получает поле schema_version.
    """

    def __init__(self, kind: str, root: Optional[Path] = None):
        self.kind = kind
        self.root = Path(root or settings.WORKBENCH['ARTIFACT_DIR']) / kind

    def path(self, key: str) -> Path:
        return self.root / f'{key}.json'

    def create(self, key: str, payload: dict) -> Path:
        """Записать артефакт"""
        self.root.mkdir(parents=True, exist_ok=True)
        document = {'schema_version': settings.WORKBENCH['SCHEMA_VERSION'], **payload}
        path = self.path(key)
        path.write_text(dump_json(document), encoding='utf-8')
        logger.info('Артефакт %s записан в %s', key, path)
        return path

    def create_or_update(self, key: str, payload: dict) -> tuple[Path, bool]:
        """Создание нового артефакта, или его перезапись"""
        created = not self.path(key).exists()
        return self.create(key, payload), created


class TranscriptRepo(BaseRepo):
    def __init__(self, root: Optional[Path] = None):
        super().__init__('transcripts', root)


class ReportRepo(BaseRepo):
    def __init__(self, root: Optional[Path] = None):
        super().__init__('reports', root)


def write_output(path: str, payload: dict) -> Path:
    """Запись артефакта по явному пути --output."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    document = {'schema_version': settings.WORKBENCH['SCHEMA_VERSION'], **payload}
    target.write_text(dump_json(document), encoding='utf-8')
    return target
