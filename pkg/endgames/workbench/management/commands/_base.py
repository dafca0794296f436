import hashlib
import logging

from typing import Any, Optional

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from workbench.exceptions import (
    ConfigurationError, PresentationError, UnsupportedError, UsageError, WorkbenchError,
)
from workbench.repositories import BaseRepo, ReportRepo, dump_json, write_output
from workbench.services import WorkbenchService


logger = logging.getLogger('workbench.commands')

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class WorkbenchCommand(BaseCommand):
    """
    Общий каркас команд стенда: разбор аргументов, валидация сериализатором,
    вызов сервиса, запись JSON-артефакта и код возврата.

    Коды возврата: 0 при успехе, 1 если проверка не прошла, 2 при ошибке использования.
    """
    serializer_class: Optional[type[serializers.Serializer]] = None
    repo_class: type[BaseRepo] = ReportRepo

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.service = WorkbenchService()

    def add_arguments(self, parser):
        parser.add_argument('--width', type=int, help='Ширина перечисления ветвлений')
        parser.add_argument('--seed', type=int, help='Зерно детерминированного перечисления')
        parser.add_argument('--budget', type=int, help='Бюджет усечения')
        parser.add_argument('--output', help='Путь JSON-артефакта')
        parser.add_argument('--save', action='store_true', help='Сохранить артефакт в каталог WORKBENCH ARTIFACT_DIR')

    def params(self, options: dict) -> dict[str, Any]:
        """Параметры команды для сериализатора; None означает значение по умолчанию."""
        keys = self.serializer_class().fields.keys() if self.serializer_class else ()
        return {key: options[key] for key in keys if options.get(key) is not None}

    def validate(self, options: dict) -> dict[str, Any]:
        if self.serializer_class is None:
            return {'output': options['output']} if options.get('output') else {}
        serializer = self.serializer_class(data=self.params(options))
        if not serializer.is_valid():
            raise CommandError(f'Некорректные параметры: {dict(serializer.errors)}', returncode=EXIT_USAGE)
        return dict(serializer.validated_data)

    def handle(self, *args, **options):
        params = self.validate(options)
        try:
            payload = self.run(params)
        except WorkbenchError as error:
            self.handle_error(error)
        self.store(params, payload, options.get('save'))
        self.stdout.write(self.render(payload))
        if not payload.get('passed', True):
            raise CommandError('Проверка не пройдена', returncode=EXIT_CHECK_FAILED)

    def run(self, params: dict) -> dict[str, Any]:
        raise NotImplementedError

    def render(self, payload: dict) -> str:
        return dump_json(payload).rstrip('\n')

    def store(self, params: dict, payload: dict, save: bool = False) -> None:
        output = params.get('output')
        if output:
            path = write_output(output, payload)
            logger.info('Артефакт записан в %s', path)
        if save:
            key = f'{self.command_name}-{hashlib.sha1(dump_json(params).encode()).hexdigest()[:12]}'
            path, created = self.repo_class().create_or_update(key, payload)
            self.stderr.write(f'{"Создан" if created else "Обновлен"} артефакт {path}')

    @property
    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def handle_error(self, error: WorkbenchError):
        logger.warning('%s: %s', error.code, error.detail)
        match error:
            case PresentationError() | ConfigurationError() | UnsupportedError() | UsageError():
                raise CommandError(f'Ошибка использования ({error.code}): {error.detail}', returncode=EXIT_USAGE)
            case _:
                raise CommandError(f'Ошибка ({error.code}): {error.detail}', returncode=error.exit_code)
