class SingleActionClip:
    """A clip cut around one action segment; `[start, end)` in video frames."""

    def __init__(self, video_id, class_id, start, end, action_start, action_end, segment_index=0):
        self.video_id = video_id
        self.class_id = class_id
        self.start = start
        self.end = end
        self.action_start = action_start
        self.action_end = action_end
        self.segment_index = segment_index

    def __repr__(self):
        return f"SingleActionClip(video_id='{self.video_id}', frames=[{self.start},{self.end}), action=[{self.action_start},{self.action_end}))"

    @property
    def frames(self):
        return range(self.start, self.end)

    @property
    def action_fraction(self):
        return (self.action_end - self.action_start)/(self.end - self.start)

    def to_dict(self):
        return {
            'video_id': self.video_id,
            'class_id': self.class_id,
            'segment_index': self.segment_index,
            'start': self.start,
            'end': self.end,
            'action_start': self.action_start,
            'action_end': self.action_end,
        }


def build_single_action_clips(gt):
    """Each segment `[a, b)` padded by its own length on both sides, clamped to the video."""
    clips = []
    for i, s in enumerate(gt.segments):
        length = s.end_frame - s.start_frame
        clips.append(SingleActionClip(
            gt.video_id, s.class_id,
            max(0, s.start_frame - length), min(gt.num_frames, s.end_frame + length),
            s.start_frame, s.end_frame, i,
        ))
    return clips
