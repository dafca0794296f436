from django.conf import settings
from rest_framework import serializers

from .exceptions import PresentationError
from .order_tree import Height


GAME_CHOICES = ['end', 'end_unrestricted', 'bm']
SUITE_CHOICES = ['subbase', 'strategy', 'partition', 'synthesis', 'transfer', 'gluing', 'product-ce', 'exchange', 'ends']


def _workbench(key: str):
    return settings.WORKBENCH[key]


class BudgetMixin(serializers.Serializer):
    """
    Общие параметры бюджета: значения по умолчанию берутся из settings.WORKBENCH.
    """
    width = serializers.IntegerField(required=False, min_value=1, max_value=64)
    seed = serializers.IntegerField(required=False, min_value=0)
    budget = serializers.IntegerField(required=False, min_value=1, max_value=4096)
    output = serializers.CharField(required=False, allow_null=True, allow_blank=False)

    def validate(self, attrs):
        attrs.setdefault('width', _workbench('WIDTH'))
        attrs.setdefault('seed', _workbench('SEED'))
        attrs.setdefault('budget', _workbench('BUDGET'))
        return attrs


class PlaySerializer(BudgetMixin):
    """
    Сериализатор для валидации параметров партии.
    """
    space = serializers.CharField(required=True, max_length=64)
    pI = serializers.CharField(required=True, max_length=64)
    pII = serializers.CharField(required=True, max_length=64)
    game = serializers.ChoiceField(choices=GAME_CHOICES, default='end')
    horizon = serializers.IntegerField(required=False, min_value=1, max_value=1024)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs.setdefault('horizon', _workbench('HORIZON'))
        return attrs


class InteractiveSerializer(BudgetMixin):
    """
    Сериализатор для валидации параметров интерактивной партии.
    """
    space = serializers.CharField(default='binary-rays', max_length=64)
    pII = serializers.CharField(default='pitz', max_length=64)
    horizon = serializers.IntegerField(required=False, min_value=1, max_value=1024)
    moves = serializers.CharField(required=False, allow_null=True)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs.setdefault('horizon', _workbench('HORIZON'))
        return attrs


class VerifySerializer(BudgetMixin):
    """
    Сериализатор для валидации параметров проверочного набора.
    """
    suite = serializers.ChoiceField(choices=SUITE_CHOICES, required=True)
    tree = serializers.CharField(default='binary', max_length=32)
    depth = serializers.CharField(required=False)
    count = serializers.IntegerField(default=100, min_value=1, max_value=10000)
    horizon = serializers.IntegerField(required=False, min_value=1, max_value=1024)

    def validate_depth(self, value):
        """
        Проверка: высота записана как "5", "omega" или "omega+3".
        """
        try:
            return str(Height.parse(value))
        except PresentationError as error:
            raise serializers.ValidationError(error.detail)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs.setdefault('horizon', _workbench('HORIZON'))
        return attrs


class SynthSerializer(BudgetMixin):
    """
    Сериализатор для валидации параметров синтеза дерева T_C.
    """
    space = serializers.CharField(default='binary-rays', max_length=64)
    strategy = serializers.CharField(default='pitz', max_length=64)
    depth = serializers.IntegerField(default=4, min_value=0, max_value=8)
    rho = serializers.CharField(required=False, allow_null=True)


class ProductSerializer(BudgetMixin):
    """
    Сериализатор для валидации параметров произведения деревьев.
    """
    trees = serializers.ListField(child=serializers.CharField(max_length=32), min_length=1, max_length=4)
    depth = serializers.IntegerField(default=3, min_value=0, max_value=6)
    power = serializers.BooleanField(default=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if attrs['power'] and len(attrs['trees']) != 1:
            raise serializers.ValidationError('Счетная степень строится по одному дереву')
        return attrs


class EndsSerializer(BudgetMixin):
    """
    Сериализатор для валидации параметров вычисления концов графа.
    """
    graph = serializers.CharField(required=True, max_length=32)
    kappa = serializers.CharField(required=False, allow_null=True)
    separators = serializers.ListField(child=serializers.CharField(allow_blank=True), default=list)
    radius = serializers.IntegerField(required=False, min_value=1, max_value=200)
    walks = serializers.ListField(child=serializers.CharField(), default=list, max_length=2)
    vertex = serializers.CharField(required=False, allow_null=True)
    k = serializers.IntegerField(default=3, min_value=1, max_value=64)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs.setdefault('radius', _workbench('RADIUS'))
        if attrs.get('vertex') and not attrs['walks']:
            raise serializers.ValidationError('Для проверки доминирования нужен луч --walk')
        return attrs


class MatchSummarySerializer(serializers.Serializer):
    """
    Сериализатор для валидации краткой сводки партии.
    """
    game = serializers.CharField()
    space = serializers.CharField()
    status = serializers.ChoiceField(choices=['adjudicated', 'undetermined', 'running'])
    winner = serializers.CharField(allow_null=True)
    rounds = serializers.IntegerField(min_value=0)
    violations = serializers.IntegerField(min_value=0)
