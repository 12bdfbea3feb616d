# src/pipeline/domain/entities/action_detector.py
"""Online action detector: recurrent backbone, object path and three heads."""

from dataclasses import dataclass

from src.encoder.domain.entities.gated_recurrent_encoder import CueBuffer, GatedRecurrentEncoder
from src.encoder.domain.value_objects.feature_snippet import EncoderState, FeatureSnippet
from src.heads.domain.entities.action_heads import ActionHeads, max_pool_queries
from src.heads.domain.value_objects.label_triple import HeadOutputs, LabelTriple
from src.numeric.domain.entities.module import Linear, Module
from src.numeric.domain.entities.tensor import Tensor
from src.numeric.domain.services import ops
from src.numeric.domain.services.random import SeedStream
from src.oam.domain.entities.object_aware_module import ObjectAwareModule
from src.objects.domain.services.aggregation_service import aggregate_scores
from src.objects.domain.value_objects.detection import ObjectScoreVector, SnippetDetections
from src.pipeline.domain.value_objects.detector_spec import DetectorSpec, IntegrationMode
from src.shared.domain.exceptions.base import DimensionException


@dataclass
class StreamState:
    """Per-video recurrent state and cue history."""

    encoder: EncoderState
    cues: CueBuffer


class ActionDetector(Module):
    """Strictly causal per-snippet classifier.

    ``none``: heads on the projected hidden state.
    ``input_concat``: projected object scores joined to the feature before the encoder.
    ``oa_module``: queries refined by object scores and recent cues.
    """

    def __init__(self, spec: DetectorSpec, stream: SeedStream):
        self.spec = spec
        d = spec.oa_config.embed_dim

        if spec.integration is IntegrationMode.INPUT_CONCAT:
            self.object_input = Linear(
                spec.num_categories, spec.object_input_dim, stream.split("object-input").generator()
            )
        self.encoder = GatedRecurrentEncoder(
            spec.encoder_input_dim, spec.hidden_dim, stream.split("encoder").generator()
        )
        if spec.integration is IntegrationMode.OA_MODULE:
            self.oam = ObjectAwareModule(
                spec.oa_config, spec.num_categories, stream.split("oa-module").generator()
            )
        else:
            self.state_projection = Linear(spec.hidden_dim, d, stream.split("state-projection").generator())
        self.heads = ActionHeads(
            d, spec.head_sizes, stream.split("heads").generator(), spec.loss_weights
        )
        self.bind_names()

    def object_scores(self, dets: SnippetDetections | None) -> ObjectScoreVector:
        """Score vector of a snippet; ``None`` means the detector returned no entry."""
        if dets is None:
            return ObjectScoreVector.zeros(self.spec.num_categories)
        return aggregate_scores(dets, self.spec.num_categories, self.spec.aggregation)

    def start(self) -> StreamState:
        """Fresh state for a new video."""
        return StreamState(self.encoder.initial_state(), CueBuffer(self.spec.cue_capacity))

    def advance(
        self,
        state: StreamState,
        snippet: FeatureSnippet,
        scores: ObjectScoreVector,
        emit: bool = True,
    ) -> HeadOutputs | None:
        """Consume one snippet, updating ``state`` in place; classify when ``emit``."""
        if snippet.dim != self.spec.feature_dim:
            raise DimensionException(
                f"Snippet {snippet.video_id}/{snippet.snippet_index} has D={snippet.dim}, "
                f"model expects {self.spec.feature_dim}"
            )
        if scores.num_categories != self.spec.num_categories:
            raise DimensionException(
                f"Object scores have {scores.num_categories} categories, model expects {self.spec.num_categories}"
            )

        x = snippet.as_row()
        if self.spec.integration is IntegrationMode.INPUT_CONCAT:
            x = ops.concat_columns([x, self.object_input(Tensor(scores.scores))])

        state.encoder, cue = self.encoder.step(state.encoder, x)
        state.cues.push(cue)
        if not emit:
            return None

        if self.spec.integration is IntegrationMode.OA_MODULE:
            refined = self.oam(scores, state.cues.as_tensor())
        else:
            refined = self.state_projection(cue)
        return self.heads.classify(max_pool_queries(refined))

    def loss(self, outputs: HeadOutputs, label: LabelTriple) -> Tensor:
        return self.heads.loss(outputs, label)
