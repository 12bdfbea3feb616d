# src/objects/infrastructure/models/detection_record.py
"""JSON Lines record schema for snippet detections."""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.objects.domain.value_objects.detection import Detection, SnippetDetections


class DetectionRecord(BaseModel):
    """One element of the ``detections`` array."""

    model_config = ConfigDict(extra="forbid")

    category_id: int = Field(..., ge=0)
    confidence: float = Field(..., ge=0.0, le=1.0)
    bbox: tuple[float, float, float, float]

    @model_validator(mode="after")
    def check_bbox(self) -> "DetectionRecord":
        x1, y1, x2, y2 = self.bbox
        if not all(0.0 <= v <= 1.0 for v in self.bbox):
            raise ValueError("bbox coordinates must lie in [0, 1]")
        if not (x1 < x2 and y1 < y2):
            raise ValueError("bbox must satisfy x1 < x2 and y1 < y2")
        return self


class SnippetDetectionsRecord(BaseModel):
    """One line of a detections file."""

    model_config = ConfigDict(extra="forbid")

    video_id: str = Field(..., min_length=1)
    snippet_index: int = Field(..., ge=0)
    detections: list[DetectionRecord] = Field(default_factory=list)

    def to_domain(self) -> SnippetDetections:
        return SnippetDetections(
            video_id=self.video_id,
            snippet_index=self.snippet_index,
            detections=[
                Detection(d.category_id, d.confidence, d.bbox) for d in self.detections
            ],
        )

    @classmethod
    def from_domain(cls, dets: SnippetDetections) -> "SnippetDetectionsRecord":
        return cls(
            video_id=dets.video_id,
            snippet_index=dets.snippet_index,
            detections=[
                DetectionRecord(
                    category_id=d.category_id, confidence=d.confidence, bbox=d.bbox
                )
                for d in dets.detections
            ],
        )
