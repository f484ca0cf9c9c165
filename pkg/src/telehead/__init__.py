"""telehead: software twin of a wire-driven expressive android head.

The package simulates the full teleoperation loop of a 21-motor head
with 31 named actuation points: per-motor servo control, the facial
rig and its Action-Unit layer, operator-expression mapping, binaural
and stereo perception models, and the publish/subscribe protocol that
ties the avatar and operator daemons together.
"""

__version__ = "0.1.0"
