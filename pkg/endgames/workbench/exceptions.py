from typing import Any


class WorkbenchError(Exception):
    """Базовая ошибка рабочего стенда."""
    code = 'workbench_error'
    exit_code = 1

    def __init__(self, detail: str, **witness: Any):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness

    def as_dict(self) -> dict[str, Any]:
        return {'code': self.code, 'detail': self.detail, 'witness': {k: str(v) for k, v in self.witness.items()}}


class PresentationError(WorkbenchError):
    """Некорректное описание дерева или пространства."""
    code = 'presentation_error'
    exit_code = 2


class InvalidRayError(WorkbenchError):
    """Дескриптор не задает луч дерева."""
    code = 'invalid_ray'


class DomainMismatchError(WorkbenchError):
    """Узел или точка не принадлежит данному дереву/пространству."""
    code = 'domain_mismatch'


class NestednessError(WorkbenchError):
    """Семейство не является вложенным."""
    code = 'nestedness_violation'


class ProtocolError(WorkbenchError):
    """Цепь не убывает или стратегия нарушила протокол построения."""
    code = 'protocol_error'


class CoverageError(WorkbenchError):
    """Покрытие не покрывает целевое множество."""
    code = 'coverage_error'


class EmptySetError(WorkbenchError):
    """Операция требует непустого множества."""
    code = 'empty_set'


class ConfigurationError(WorkbenchError):
    """Не хватает данных конфигурации (например, таблицы ρ)."""
    code = 'configuration_error'
    exit_code = 2


class UnsupportedError(WorkbenchError):
    """Пресет или дерево не поддерживается операцией."""
    code = 'unsupported'
    exit_code = 2


class InvariantViolation(WorkbenchError):
    """Нарушен инвариант (например, согласованность связующих отображений)."""
    code = 'invariant_violation'


class InvalidWalkError(WorkbenchError):
    """Блуждание выходит за пределы графа."""
    code = 'invalid_walk'


class UsageError(WorkbenchError):
    """Неверные параметры команды."""
    code = 'usage_error'
    exit_code = 2
