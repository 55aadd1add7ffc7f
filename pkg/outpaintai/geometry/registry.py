"""
车辆类别注册表
"""
from dataclasses import dataclass
from typing import List, Optional


@dataclass(frozen=True)
class VehicleClass:
    """单个类别"""

    id: int
    name: str
    subcategories: str


class ClassRegistry:
    """
    有序类别表，ID 从 0 连续编号

    默认表共 9 类：COUPE ... TRUCK
    """

    DEFAULT_CLASSES = [
        (0, "COUPE", "Coupe, Convertible, Cabriolet, or other two-door passenger cars"),
        (1, "SEDAN", "Sedan, or other four-door passenger cars"),
        (2, "SUV", "SUV or Crossover"),
        (3, "MINIVAN", "Minivan or Wagon"),
        (4, "MINIBUS", "Minibus, Shuttles, or large passenger vans"),
        (5, "BUS", "City, Coach, Double-Decker, Articulated, or School Bus"),
        (6, "VAN", "Work, Camper, or Conversion Van"),
        (7, "PICKUP", "Regular, Crew Cab, or Extended Cab Pickup Truck"),
        (8, "TRUCK", "Single Unit, Trailer, Articulated, Dump, Tanker, or Mixer Truck"),
    ]

    def __init__(self, classes: Optional[List[tuple]] = None):
        entries = classes if classes is not None else self.DEFAULT_CLASSES
        self.classes = [VehicleClass(int(i), str(n), str(s)) for i, n, s in entries]

        ids = [c.id for c in self.classes]
        if ids != list(range(len(ids))):
            raise ValueError(f"类别 ID 必须从 0 连续编号: {ids}")
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise ValueError(f"类别名称重复: {names}")

        self._by_name = {c.name: c for c in self.classes}

    def __len__(self) -> int:
        return len(self.classes)

    def __contains__(self, class_id) -> bool:
        return isinstance(class_id, int) and 0 <= class_id < len(self.classes)

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.classes]

    def name_of(self, class_id: int) -> str:
        return self.classes[class_id].name

    def id_of(self, name: str) -> int:
        """按名称查找 ID（大小写不敏感）"""
        key = name.strip().upper()
        if key not in self._by_name:
            raise KeyError(f"未知类别: {name}")
        return self._by_name[key].id


DEFAULT_REGISTRY = ClassRegistry()
