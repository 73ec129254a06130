from .report_service import ReportService
