"""
画廊预览服务器
只读地提供已生成的静态画廊和 JSON 报告
"""
import json
from pathlib import Path

from flask import Flask, abort, jsonify, send_from_directory
from flask_cors import CORS

from .stats import RunStats
from ..logger import get_logger

logger = get_logger("web.server")


class GalleryServer:
    """画廊预览服务器"""

    def __init__(self, host: str = "127.0.0.1", port: int = 8080, workdir: str = "data"):
        """
        初始化预览服务器

        Args:
            host: 监听地址
            port: 监听端口
            workdir: 流水线工作目录（读取 reports/）
        """
        self.host = host
        self.port = port
        self.workdir = Path(workdir)
        self.reports_dir = self.workdir / "reports"
        self.gallery_dir = self.reports_dir / "gallery"
        self.stats = RunStats(workdir)

        self.app = Flask(__name__)
        CORS(self.app)
        self._register_routes()

        logger.info(f"预览服务器初始化完成: http://{host}:{port}")

    def _read_report(self, name: str):
        path = self.reports_dir / name
        if not path.exists():
            abort(404)
        return json.loads(path.read_text(encoding="utf-8"))

    def _register_routes(self):
        """注册路由"""

        @self.app.route('/')
        def index():
            """画廊首页"""
            if not (self.gallery_dir / "index.html").exists():
                abort(404)
            return send_from_directory(self.gallery_dir, "index.html")

        @self.app.route('/thumbs/<path:name>')
        def thumbs(name):
            return send_from_directory(self.gallery_dir / "thumbs", name)

        @self.app.route('/api/run')
        def run_report():
            """运行统计（实时从清单计算）"""
            return jsonify(self.stats.summary())

        @self.app.route('/api/metrics')
        def metrics():
            return jsonify(self._read_report("metrics.json"))

        @self.app.route('/health')
        def health():
            """健康检查"""
            return jsonify({'status': 'ok', 'gallery': (self.gallery_dir / "index.html").exists()})

    def run(self, debug: bool = False):
        """
        启动服务器（同步模式）

        Args:
            debug: 是否开启调试模式
        """
        logger.info(f"🌐 画廊预览: http://{self.host}:{self.port}")
        self.app.run(host=self.host, port=self.port, debug=debug, use_reloader=False)
