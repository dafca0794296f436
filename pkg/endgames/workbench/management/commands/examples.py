from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Список пресетов пространств, графов, стратегий и проверочных наборов'

    def run(self, params: dict) -> dict:
        return self.service.examples()
