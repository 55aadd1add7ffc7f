"""
逐行 JSON 清单

行内容按键排序、不带时间戳；阶段结束时按续跑键整体重写一次，
这样并发写入的先后顺序不会影响最终文件
"""
import asyncio
import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional

try:
    import aiofiles
    HAS_AIOFILES = True
except ImportError:
    HAS_AIOFILES = False

from ..exceptions import PipelineIOError
from ..logger import get_logger

logger = get_logger("utils.jsonl")


def dumps_row(row: Dict[str, Any]) -> str:
    """单行序列化（键排序，保留中文）"""
    return json.dumps(row, sort_keys=True, ensure_ascii=False)


def read_jsonl(path, required: bool = True) -> List[Dict[str, Any]]:
    """
    读取清单

    Args:
        path: 文件路径
        required: 文件不存在时是否报错（否则返回空列表）

    Returns:
        行列表
    """
    path = Path(path)
    if not path.exists():
        if required:
            raise PipelineIOError(f"清单不存在: {path}")
        return []

    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise PipelineIOError(f"清单 {path} 第 {line_no} 行不是合法 JSON: {e}") from e
    return rows


def write_jsonl(path, rows: Iterable[Dict[str, Any]], sort_key: Optional[Callable] = None) -> int:
    """
    整体写入清单（可选排序）

    Returns:
        写入行数
    """
    path = Path(path)
    rows = list(rows)
    if sort_key is not None:
        rows.sort(key=sort_key)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(dumps_row(row) + "\n")
    return len(rows)


class JsonlAppender:
    """
    串行化追加写入器

    多个协程共享一个实例，通过 asyncio.Lock 保证行不交错
    """

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = asyncio.Lock()
        self.count = 0

    async def append(self, row: Dict[str, Any]):
        line = dumps_row(row) + "\n"
        async with self._lock:
            if HAS_AIOFILES:
                async with aiofiles.open(self.path, "a", encoding="utf-8", newline="\n") as f:
                    await f.write(line)
            else:
                # 降级为同步 I/O
                with open(self.path, "a", encoding="utf-8", newline="\n") as f:
                    f.write(line)
            self.count += 1

    def rows(self) -> List[Dict[str, Any]]:
        return read_jsonl(self.path, required=False)

    def finalize(self, sort_key: Callable) -> int:
        """按续跑键重写文件，返回行数"""
        n = write_jsonl(self.path, self.rows(), sort_key=sort_key)
        logger.debug(f"清单已整理: {self.path} ({n} 行)")
        return n
